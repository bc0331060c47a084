use std::collections::{BTreeMap, BTreeSet};

use bsr_core::frontend::raw::{RawAtom, RawClause, RawProblem, RawTerm};
use bsr_core::frontend::{check_fragment, parse_raw, FragmentClass};
use bsr_core::syntax::Rational;
use bsr_core::tcm::{matches_template, SimOutcome};
use bsr_core::{EncodingStyle, TwoCounterMachine};
use num_traits::{One, Zero};

const COUNTDOWN: &str = "start 1 init 2 0\n1: dec c1 goto 1 else 2\n2: halt\n";
const MACHINES: [&str; 4] = [
    COUNTDOWN,
    "start 1 init 3 1\n1: dec c1 goto 2 else 3\n2: inc c2 goto 1\n3: halt\n",
    "start a init 1 2\na: dec c2 goto a else b\nb: dec c1 goto b else h\nh: halt\n",
    "start 1 init 0 0\n1: inc c1 goto 1\n",
];

fn numbers(t: &RawTerm, out: &mut BTreeSet<Rational>) {
    match t {
        RawTerm::Num(q) => {
            out.insert(q.clone());
        }
        RawTerm::App(_, args) => args.iter().for_each(|a| numbers(a, out)),
        RawTerm::Eps(t) => numbers(t, out),
        RawTerm::Sym(_) | RawTerm::Minf => {}
    }
}

fn instruction_clauses(p: &RawProblem) -> Vec<&RawClause> {
    p.clauses.iter().filter(|c| !c.antecedent.is_empty()).collect()
}

#[test]
fn encodings_have_the_documented_shapes() {
    let m: TwoCounterMachine = COUNTDOWN.parse().unwrap();
    for style in EncodingStyle::ALL {
        let text = m.encode(style);
        let p = parse_raw(&text).unwrap_or_else(|e| panic!("{}\n{}", e, text));
        assert!(matches!(check_fragment(&p), FragmentClass::OutOfFragment { .. }), "{}", style);
        let mut consts = BTreeSet::new();
        for c in instruction_clauses(&p) {
            for k in &c.constraints {
                assert!(matches_template(style, k), "{}: `{}`", style, k);
                numbers(&k.lhs, &mut consts);
                numbers(&k.rhs, &mut consts);
            }
        }
        let expected: &[i64] = match style {
            EncodingStyle::Difference => &[1],
            EncodingStyle::Quotient => &[2],
            EncodingStyle::Additive => &[0, 1],
            EncodingStyle::Multiplicative => &[1, 2],
        };
        let expected: BTreeSet<Rational> = expected.iter().map(|&n| Rational::from_integer(n.into())).collect();
        assert_eq!(consts, expected, "{}", style);
        assert_eq!(p.predicates["M"].len(), if matches!(style, EncodingStyle::Difference | EncodingStyle::Quotient) { 4 } else { 7 });
    }
}

#[test]
fn countdown_simulation() {
    let m: TwoCounterMachine = COUNTDOWN.parse().unwrap();
    assert!(matches!(m.simulate(1000), SimOutcome::Halted { steps: 3, .. }));
}

/// A state: label constant and register values in argument order.
type Fact = (String, Vec<Rational>);

fn eval(t: &RawTerm, env: &BTreeMap<String, Rational>) -> Option<Rational> {
    t.eval(&|s: &str| env.get(s).cloned())
}

/// Extends `env` by solving equations with a single unknown, then checks
/// every constraint.
fn solve_constraints(c: &RawClause, env: &mut BTreeMap<String, Rational>) -> bool {
    loop {
        let mut progress = false;
        for k in &c.constraints {
            let mut syms = Vec::new();
            k.lhs.symbols(&mut syms);
            k.rhs.symbols(&mut syms);
            let unknown: BTreeSet<&String> = syms.iter().filter(|s| !env.contains_key(*s)).collect();
            if unknown.len() != 1 || k.rel.symbol() != "=" {
                continue;
            }
            let u = (*unknown.iter().next().unwrap()).clone();
            let f = |x: Rational, env: &BTreeMap<String, Rational>| {
                let mut e = env.clone();
                e.insert(u.clone(), x);
                eval(&k.lhs, &e).unwrap() - eval(&k.rhs, &e).unwrap()
            };
            let f0 = f(Rational::zero(), env);
            let a = f(Rational::one(), env) - &f0;
            env.insert(u, -f0 / a);
            progress = true;
        }
        if !progress {
            break;
        }
    }
    c.constraints.iter().all(|k| match (eval(&k.lhs, env), eval(&k.rhs, env)) {
        (Some(l), Some(r)) => k.rel.holds(l.cmp(&r)),
        _ => false,
    })
}

fn atom_parts(a: &RawAtom) -> (&str, &[RawTerm]) {
    match a {
        RawAtom::Pred { symbol, args } if symbol == "M" => match &args[0] {
            RawTerm::Sym(b) => (b.as_str(), &args[1..]),
            _ => panic!("label expected"),
        },
        _ => panic!("unexpected atom"),
    }
}

/// Forward chaining from the start clause; the number of derived facts
/// before a clause with empty succedent fires, if one does within `bound`.
fn run(p: &RawProblem, bound: usize) -> (Option<usize>, Fact) {
    let start = p.clauses.iter().find(|c| c.antecedent.is_empty()).unwrap();
    let mut env = BTreeMap::new();
    assert!(solve_constraints(start, &mut env));
    let (label, args) = atom_parts(&start.succedent[0]);
    let mut fact: Fact = (label.to_string(), args.iter().map(|t| eval(t, &env).unwrap()).collect());
    for step in 0..=bound {
        let mut next = None;
        for c in instruction_clauses(p) {
            let (label, args) = atom_parts(&c.antecedent[0]);
            if label != fact.0 {
                continue;
            }
            let mut env: BTreeMap<String, Rational> = args
                .iter()
                .zip(&fact.1)
                .map(|(t, v)| match t {
                    RawTerm::Sym(s) => (s.clone(), v.clone()),
                    _ => panic!("variable expected"),
                })
                .collect();
            if !solve_constraints(c, &mut env) {
                continue;
            }
            let Some(head) = c.succedent.first() else { return (Some(step), fact) };
            let (l, args) = atom_parts(head);
            assert!(next.is_none(), "two clauses fire");
            next = Some((l.to_string(), args.iter().map(|t| eval(t, &env).unwrap()).collect()));
        }
        if step == bound {
            break;
        }
        fact = next.expect("some clause fires");
    }
    (None, fact)
}

fn log2_exact(mut q: Rational) -> u64 {
    let mut k = 0;
    let two = Rational::from_integer(2.into());
    while q > Rational::one() {
        q /= &two;
        k += 1;
    }
    assert_eq!(q, Rational::one());
    k
}

/// Counter values encoded by a state.
fn decode(style: EncodingStyle, v: &[Rational]) -> (u64, u64) {
    let (x, y, z) = match style {
        EncodingStyle::Difference | EncodingStyle::Quotient => (&v[0], &v[1], &v[2]),
        _ => (&v[0], &v[2], &v[4]),
    };
    let one = Rational::one();
    match style {
        EncodingStyle::Difference | EncodingStyle::Additive => {
            let c = |r: &Rational| (r - z - &one).to_integer().try_into().unwrap();
            (c(x), c(y))
        }
        _ => {
            let c = |r: &Rational| log2_exact(z / (r * Rational::from_integer(2.into())));
            (c(x), c(y))
        }
    }
}

#[test]
fn encodings_follow_the_machine() {
    for text in MACHINES {
        let m: TwoCounterMachine = text.parse().unwrap();
        let sim = m.simulate(40);
        for style in EncodingStyle::ALL {
            let p = parse_raw(&m.encode(style)).unwrap();
            let (halted, fact) = run(&p, 40);
            match &sim {
                SimOutcome::Halted { steps, counters } => {
                    assert_eq!(halted, Some(*steps as usize), "{} {}", style, text);
                    assert_eq!(decode(style, &fact.1), *counters, "{} {}", style, text);
                }
                SimOutcome::Running { counters, .. } => {
                    assert_eq!(halted, None, "{} {}", style, text);
                    assert_eq!(decode(style, &fact.1), *counters, "{} {}", style, text);
                }
            }
        }
    }
}
