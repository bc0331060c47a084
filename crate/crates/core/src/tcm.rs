//! Two-counter machines: a loader, a bounded simulator, and encoders into
//! clause sets whose constraints go just beyond simple bounds.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::frontend::raw::{Op, RawConstraint, RawTerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Counter {
    C1,
    C2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instr {
    Inc { counter: Counter, goto: String },
    Dec { counter: Counter, nonzero: String, zero: String },
    Halt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoCounterMachine {
    pub instructions: BTreeMap<String, Instr>,
    pub start: String,
    pub initial: (u64, u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TcmError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `start` line")]
    NoStart,
    #[error("undefined label `{0}`")]
    UndefinedLabel(String),
    #[error("label `{0}` defined twice")]
    DuplicateLabel(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimOutcome {
    Halted { steps: u64, counters: (u64, u64) },
    Running { label: String, counters: (u64, u64) },
}

fn register(counters: &mut (u64, u64), k: Counter) -> &mut u64 {
    match k {
        Counter::C1 => &mut counters.0,
        Counter::C2 => &mut counters.1,
    }
}

fn valid_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl FromStr for TwoCounterMachine {
    type Err = TcmError;

    fn from_str(text: &str) -> Result<TwoCounterMachine, TcmError> {
        let mut instructions = BTreeMap::new();
        let mut start = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: &str| TcmError::Syntax { line, message: message.to_string() };
            let words: Vec<&str> = content.split_whitespace().collect();
            if words[0] == "start" {
                let [_, label, "init", n, m] = words.as_slice() else {
                    return Err(err("expected `start <label> init <n> <m>`"));
                };
                let n = n.parse().map_err(|_| err("counter values must be nonnegative integers"))?;
                let m = m.parse().map_err(|_| err("counter values must be nonnegative integers"))?;
                start = Some((label.to_string(), (n, m)));
                continue;
            }
            let (label, rest) = content.split_once(':').ok_or_else(|| err("expected `<label>: ...`"))?;
            let label = label.trim();
            if !valid_label(label) {
                return Err(err("labels consist of letters, digits and `_`"));
            }
            let counter = |w: &str| match w {
                "c1" => Ok(Counter::C1),
                "c2" => Ok(Counter::C2),
                _ => Err(err("counter must be c1 or c2")),
            };
            let words: Vec<&str> = rest.split_whitespace().collect();
            let instr = match words.as_slice() {
                ["inc", c, "goto", l] => Instr::Inc { counter: counter(c)?, goto: l.to_string() },
                ["dec", c, "goto", l, "else", z] => {
                    Instr::Dec { counter: counter(c)?, nonzero: l.to_string(), zero: z.to_string() }
                }
                ["halt"] => Instr::Halt,
                _ => return Err(err("unknown instruction")),
            };
            if instructions.insert(label.to_string(), instr).is_some() {
                return Err(TcmError::DuplicateLabel(label.to_string()));
            }
        }
        let (start, initial) = start.ok_or(TcmError::NoStart)?;
        let m = TwoCounterMachine { instructions, start, initial };
        m.check()?;
        Ok(m)
    }
}

impl TwoCounterMachine {
    fn check(&self) -> Result<(), TcmError> {
        let defined = |l: &String| {
            if self.instructions.contains_key(l) {
                Ok(())
            } else {
                Err(TcmError::UndefinedLabel(l.clone()))
            }
        };
        defined(&self.start)?;
        for instr in self.instructions.values() {
            match instr {
                Instr::Inc { goto, .. } => defined(goto)?,
                Instr::Dec { nonzero, zero, .. } => {
                    defined(nonzero)?;
                    defined(zero)?;
                }
                Instr::Halt => {}
            }
        }
        Ok(())
    }

    /// Runs at most `bound` transitions.
    pub fn simulate(&self, bound: u64) -> SimOutcome {
        let mut label = self.start.clone();
        let mut counters = self.initial;
        let mut steps = 0;
        loop {
            let instr = &self.instructions[&label];
            if let Instr::Halt = instr {
                return SimOutcome::Halted { steps, counters };
            }
            if steps == bound {
                return SimOutcome::Running { label, counters };
            }
            label = match instr {
                Instr::Inc { counter, goto } => {
                    *register(&mut counters, *counter) += 1;
                    goto.clone()
                }
                Instr::Dec { counter, nonzero, zero } => {
                    let r = register(&mut counters, *counter);
                    if *r == 0 {
                        zero.clone()
                    } else {
                        *r -= 1;
                        nonzero.clone()
                    }
                }
                Instr::Halt => unreachable!(),
            };
            steps += 1;
        }
    }

    /// The clause set of `style` for this machine, as problem text.
    pub fn encode(&self, style: EncodingStyle) -> String {
        let enc = Encoder { style };
        let mut out = String::new();
        let sorts = vec!["R"; enc.width()].join(" ");
        let _ = writeln!(out, "pred M : S {}.", sorts);
        for l in self.instructions.keys() {
            let _ = writeln!(out, "const {} : S.", label_const(l));
        }
        let _ = writeln!(out, "{}", enc.start(&self.start, self.initial));
        for (l, instr) in &self.instructions {
            for clause in enc.instruction(l, instr) {
                let _ = writeln!(out, "{}", clause);
            }
        }
        out
    }
}

impl fmt::Display for TwoCounterMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "start {} init {} {}", self.start, self.initial.0, self.initial.1)?;
        for (l, instr) in &self.instructions {
            let c = |k: &Counter| if *k == Counter::C1 { "c1" } else { "c2" };
            match instr {
                Instr::Inc { counter, goto } => writeln!(f, "{}: inc {} goto {}", l, c(counter), goto)?,
                Instr::Dec { counter, nonzero, zero } => {
                    writeln!(f, "{}: dec {} goto {} else {}", l, c(counter), nonzero, zero)?
                }
                Instr::Halt => writeln!(f, "{}: halt", l)?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EncodingStyle {
    Difference,
    Quotient,
    Additive,
    Multiplicative,
}

impl EncodingStyle {
    pub const ALL: [EncodingStyle; 4] =
        [EncodingStyle::Difference, EncodingStyle::Quotient, EncodingStyle::Additive, EncodingStyle::Multiplicative];
}

impl FromStr for EncodingStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<EncodingStyle, String> {
        match s {
            "difference" => Ok(EncodingStyle::Difference),
            "quotient" => Ok(EncodingStyle::Quotient),
            "additive" => Ok(EncodingStyle::Additive),
            "multiplicative" => Ok(EncodingStyle::Multiplicative),
            _ => Err(format!("unknown encoding style `{}`", s)),
        }
    }
}

impl fmt::Display for EncodingStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncodingStyle::Difference => "difference",
            EncodingStyle::Quotient => "quotient",
            EncodingStyle::Additive => "additive",
            EncodingStyle::Multiplicative => "multiplicative",
        })
    }
}

pub fn label_const(label: &str) -> String {
    format!("b_{}", label)
}

/// Register names: the three counters-with-offset, each followed by its
/// inverse in the styles that track one.
#[derive(Clone, Copy)]
struct Encoder {
    style: EncodingStyle,
}

const REGS: [&str; 3] = ["x", "y", "z"];

impl Encoder {
    fn paired(&self) -> bool {
        matches!(self.style, EncodingStyle::Additive | EncodingStyle::Multiplicative)
    }

    fn width(&self) -> usize {
        if self.paired() {
            6
        } else {
            3
        }
    }

    fn inverse(&self, r: &str) -> String {
        let (base, prime) = r.split_at(1);
        match self.style {
            EncodingStyle::Additive => format!("{}m{}", base, prime),
            _ => format!("{}i{}", base, prime),
        }
    }

    /// `M(b_l, ...)` over the registers, priming those in `changed`.
    fn atom(&self, label: &str, changed: &[&str]) -> String {
        let mut args = vec![label_const(label)];
        for r in REGS {
            let name = if changed.contains(&r) { format!("{}'", r) } else { r.to_string() };
            if self.paired() {
                let inv = self.inverse(&name);
                args.push(name);
                args.push(inv);
            } else {
                args.push(name);
            }
        }
        format!("M({})", args.join(", "))
    }

    /// Constraints making `r'` the successor of `r`: one step up the offset
    /// scale for the difference styles, one halving for the quotient styles.
    fn step(&self, r: &str) -> Vec<String> {
        let p = format!("{}'", r);
        match self.style {
            EncodingStyle::Difference => vec![format!("{} - {} = 1", p, r)],
            EncodingStyle::Quotient => vec![format!("2*{} = {}", p, r)],
            EncodingStyle::Additive => {
                vec![format!("{} + {} = 1", p, self.inverse(r)), format!("{} + {} = 0", p, self.inverse(&p))]
            }
            EncodingStyle::Multiplicative => {
                vec![format!("{} * {} = 2", r, self.inverse(&p)), format!("{} * {} = 1", p, self.inverse(&p))]
            }
        }
    }

    /// Compares counter register `r` against the offset `z`; `rel` is `=`
    /// for the zero test and the strict relation for the nonzero test.
    fn zero_test(&self, r: &str, zero: bool) -> String {
        match (self.style, zero) {
            (EncodingStyle::Difference, true) => format!("{} - z = 1", r),
            (EncodingStyle::Difference, false) => format!("{} - z > 1", r),
            (EncodingStyle::Quotient, true) => format!("2*{} = z", r),
            (EncodingStyle::Quotient, false) => format!("2*{} < z", r),
            (EncodingStyle::Additive, true) => format!("{} + zm = 1", r),
            (EncodingStyle::Additive, false) => format!("{} + zm > 1", r),
            (EncodingStyle::Multiplicative, true) => format!("z * {} = 2", self.inverse(r)),
            (EncodingStyle::Multiplicative, false) => format!("z * {} > 2", self.inverse(r)),
        }
    }

    fn clause(&self, constraints: &[String], from: &str, to: &str, changed: &[&str]) -> String {
        format!("{} || {} -> {}.", constraints.join(", "), self.atom(from, &[]), self.atom(to, changed))
    }

    fn instruction(&self, label: &str, instr: &Instr) -> Vec<String> {
        let reg = |c: &Counter| if *c == Counter::C1 { "x" } else { "y" };
        let other = |c: &Counter| if *c == Counter::C1 { "y" } else { "x" };
        match instr {
            Instr::Inc { counter, goto } => {
                vec![self.clause(&self.step(reg(counter)), label, goto, &[reg(counter)])]
            }
            Instr::Dec { counter, nonzero, zero } => {
                let (r, o) = (reg(counter), other(counter));
                let mut guard = vec![self.zero_test(r, false)];
                guard.extend(self.step(o));
                guard.extend(self.step("z"));
                vec![
                    self.clause(&[self.zero_test(r, true)], label, zero, &[]),
                    self.clause(&guard, label, nonzero, &[o, "z"]),
                ]
            }
            Instr::Halt => vec![format!("|| {} ->.", self.atom(label, &[]))],
        }
    }

    fn start(&self, label: &str, (n, m): (u64, u64)) -> String {
        let pow = |k: u64| -> String {
            let k = u32::try_from(k + 1).expect("counter value fits");
            format!("1/{}", num_bigint::BigUint::from(2u32).pow(k))
        };
        let values: Vec<(&str, String, String)> = match self.style {
            EncodingStyle::Difference | EncodingStyle::Additive => vec![
                ("x", (n + 1).to_string(), format!("-{}", n + 1)),
                ("y", (m + 1).to_string(), format!("-{}", m + 1)),
                ("z", "0".into(), "0".into()),
            ],
            EncodingStyle::Quotient | EncodingStyle::Multiplicative => vec![
                ("x", pow(n), num_bigint::BigUint::from(2u32).pow(n as u32 + 1).to_string()),
                ("y", pow(m), num_bigint::BigUint::from(2u32).pow(m as u32 + 1).to_string()),
                ("z", "1".into(), "1".into()),
            ],
        };
        let mut constraints = Vec::new();
        for (r, v, inv) in values {
            constraints.push(format!("{} = {}", r, v));
            if self.paired() {
                constraints.push(format!("{} = {}", self.inverse(r), inv));
            }
        }
        format!("{} || -> {}.", constraints.join(", "), self.atom(label, &[]))
    }
}

fn is_var(t: &RawTerm) -> bool {
    matches!(t, RawTerm::Sym(_))
}

/// Whether a constraint has the single shape allowed in `style`:
/// `u - v ◁ c`, `u ◁ c·v`, `u + v ◁ c` or `u·v ◁ c` with variables `u`, `v`.
pub fn matches_template(style: EncodingStyle, c: &RawConstraint) -> bool {
    let num = |t: &RawTerm| matches!(t, RawTerm::Num(_));
    let scaled = |t: &RawTerm| matches!(t, RawTerm::App(Op::Mul, a) if num(&a[0]) && is_var(&a[1]));
    let binary = |t: &RawTerm, op: Op| matches!(t, RawTerm::App(o, a) if *o == op && is_var(&a[0]) && is_var(&a[1]));
    match style {
        EncodingStyle::Difference => binary(&c.lhs, Op::Sub) && num(&c.rhs),
        EncodingStyle::Quotient => (scaled(&c.lhs) && is_var(&c.rhs)) || (is_var(&c.lhs) && scaled(&c.rhs)),
        EncodingStyle::Additive => binary(&c.lhs, Op::Add) && num(&c.rhs),
        EncodingStyle::Multiplicative => binary(&c.lhs, Op::Mul) && num(&c.rhs),
    }
}
