use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use bsr_core::decide::{OracleVerdict, VerifyOutcome};
use bsr_core::frontend::raw::{RawProblem, RawTerm};
use bsr_core::frontend::parse_raw;
use bsr_core::ground::{display_folded, instantiate_base_var, size_bound, unbound_base_var, GroundOptions};
use bsr_core::syntax::{rat, Rational};
use bsr_core::tcm::{matches_template, SimOutcome};
use bsr_core::testgen::{random_problem, GenConfig};
use bsr_core::{
    ap_classes, check_fragment, ground_all, inst_points, is_normal_form, normalize, oracle_solve, parse, purify,
    solve, verify_model, ClauseSet, ConstSym, DecideOptions, Decision, EncodingStyle, FragmentClass,
    HierarchicModel, ModelValue, FreeCongruence, Position, TwoCounterMachine,
};
use rand::rngs::StdRng;
use rand::SeedableRng;

type Outcome = Result<String, String>;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn text(name: &str) -> String {
    std::fs::read_to_string(data(name)).expect("golden file")
}

fn eps(n: i64) -> ConstSym {
    ConstSym::eps(ConstSym::int(n))
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {:?}, limit {:?}", t, limit))
}

fn sorted_instances(g: &ClauseSet) -> Vec<String> {
    let mut v: Vec<String> = g.clauses.iter().map(display_folded).collect();
    v.sort();
    v
}

/// Every SAT verdict seen anywhere is checked here.
struct Gate {
    sat: usize,
    failures: Vec<String>,
}

impl Gate {
    fn record(&mut self, label: &str, grounding: &ClauseSet, m: &HierarchicModel) {
        self.sat += 1;
        if verify_model(grounding, m) != Ok(VerifyOutcome::Satisfied) {
            self.failures.push(label.to_string());
        }
    }
}

fn criterion_1(gate: &mut Gate) -> Outcome {
    let start = Instant::now();
    let set = parse(&text("intro.bsr")).map_err(|e| e.to_string())?;
    let s = solve(&set, &DecideOptions::default()).map_err(|e| e.to_string())?;
    let expected = [
        "@eps(5) != 5 || R(@minf) -> Q(c, @eps(5)).",
        "@minf != 5 || R(@minf) -> Q(c, @minf).",
        "@minf < 7, @eps(5) <= 2 || -> Q(c, @eps(5)), R(@minf).",
        "@minf < 7, @minf <= 2 || -> Q(c, @minf), R(@minf).",
    ];
    ensure(sorted_instances(&s.grounding.ground) == expected, "instances differ")?;
    let axioms = sorted_instances(&s.grounding.axioms);
    let expected_axioms =
        ["@eps(5) <= 5 || ->.", "@eps(5) >= 7 || ->.", "@minf >= 2 || ->.", "@minf >= 5 || ->.", "@minf >= 7 || ->."];
    ensure(axioms == expected_axioms, format!("axioms differ: {:?}", axioms))?;
    let combined = s.grounding.combined();
    let Decision::Sat(m) = &s.decision else { return Err(format!("verdict {}", s.decision.verdict())) };
    gate.record("intro", &combined, m);
    let minf = &m.base_values[&ConstSym::AlphaMinf];
    let e5 = &m.base_values[&eps(5)];
    ensure(*minf < rat(2) && rat(5) < *e5 && *e5 < rat(7), format!("@minf = {}, @eps(5) = {}", minf, e5))?;
    let c = || ModelValue::Class(ConstSym::free("c"));
    let witness = HierarchicModel {
        base_values: [(ConstSym::AlphaMinf, rat(1)), (eps(5), rat(6))].into(),
        congruence: FreeCongruence::from_classes([[ConstSym::free("c")].into()]),
        extensions: [
            ("R".to_string(), [vec![ModelValue::Real(rat(1))]].into()),
            ("Q".to_string(), [vec![c(), ModelValue::Real(rat(6))], vec![c(), ModelValue::Real(rat(1))]].into()),
        ]
        .into(),
    };
    ensure(verify_model(&combined, &witness) == Ok(VerifyOutcome::Satisfied), "witness rejected")?;
    let out = Command::new(env!("CARGO_BIN_EXE_bsr")).arg("ground").arg(data("intro.bsr")).output().map_err(|e| e.to_string())?;
    let printed = String::from_utf8_lossy(&out.stdout);
    for line in expected.iter().chain(&expected_axioms) {
        ensure(printed.lines().any(|l| l == *line), format!("`ground` output lacks `{}`", line))?;
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!("4 instances, {} axioms, @minf = {}, @eps(5) = {}", axioms.len(), minf, e5))
}

fn criterion_2(gate: &mut Gate) -> Outcome {
    let start = Instant::now();
    let set = normalize(&parse(&text("two_bounds.bsr")).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let classes = ap_classes(&set);
    let points = inst_points(&set, &classes);
    let class = classes.class_of(&Position::new("Q", 1)).ok_or("no class for x")?;
    let pts = points.get(class).ok_or("no points for x")?;
    ensure(*pts == BTreeSet::from([ConstSym::AlphaMinf, eps(2)]), format!("points {:?}", pts))?;
    let g = ground_all(&set, &GroundOptions::default()).map_err(|e| e.to_string())?;
    let inst = sorted_instances(&g.ground);
    for want in ["@minf > 2 || Q(@minf, 4) -> T(@minf).", "@eps(2) > 2 || Q(@eps(2), 4) -> T(@eps(2))."] {
        ensure(inst.iter().any(|i| i == want), format!("missing `{}`", want))?;
    }
    let axioms = sorted_instances(&g.axioms);
    let expected = ["@eps(2) <= 2 || ->.", "@eps(2) >= 4 || ->.", "@minf >= 2 || ->.", "@minf >= 4 || ->."];
    ensure(axioms == expected, format!("axioms {:?}", axioms))?;
    let s = solve(&set, &DecideOptions::default()).map_err(|e| e.to_string())?;
    let Decision::Sat(m) = &s.decision else { return Err("expected sat".into()) };
    gate.record("example", &s.grounding.combined(), m);
    let e2 = &m.base_values[&eps(2)];
    ensure(rat(2) < *e2 && *e2 < rat(4), format!("@eps(2) = {}", e2))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("points {{@minf, @eps(2)}}, @eps(2) = {}", e2))
}

fn random_texts(seed: u64, n: usize) -> Vec<String> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n).map(|_| random_problem(&mut rng, &GenConfig::default())).collect()
}

fn criterion_3(gate: &mut Gate) -> Outcome {
    let start = Instant::now();
    let (mut sat, mut unsat) = (0, 0);
    for text in random_texts(2024, 250) {
        let set = parse(&text).map_err(|e| e.to_string())?;
        let expected = oracle_solve(&set).map_err(|e| format!("{}\n{}", e, text))?;
        let s = solve(&set, &DecideOptions::default()).map_err(|e| format!("{}\n{}", e, text))?;
        let got = match &s.decision {
            Decision::Sat(m) => {
                gate.record(&text, &s.grounding.combined(), m);
                OracleVerdict::Sat
            }
            Decision::Unsat => OracleVerdict::Unsat,
            Decision::Unknown(r) => return Err(format!("unknown: {}\n{}", r, text)),
        };
        ensure(got == expected, format!("disagreement on\n{}", text))?;
        if got == OracleVerdict::Sat {
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!("250 problems agree ({} sat, {} unsat) in {:.1?}", sat, unsat, start.elapsed()))
}

fn criterion_4() -> Outcome {
    let mut sets = 0;
    let mut steps = 0;
    for text in random_texts(310, 2000) {
        if sets == 60 {
            break;
        }
        let set = normalize(&purify(&parse(&text).map_err(|e| e.to_string())?)).map_err(|e| e.to_string())?;
        ensure(is_normal_form(&set).0, format!("not normal\n{}", text))?;
        let classes = ap_classes(&set);
        let points = inst_points(&set, &classes);
        if unbound_base_var(&set, &classes).is_none() {
            continue;
        }
        sets += 1;
        let mut cur = set.clone();
        while let Some((i, v)) = unbound_base_var(&cur, &ap_classes(&cur)) {
            let cls = ap_classes(&cur);
            let pts = inst_points(&cur, &cls);
            cur = instantiate_base_var(&cur, &cls, &pts, i, &v);
            steps += 1;
            let cls = ap_classes(&cur);
            ensure(cls == classes, format!("classes changed\n{}", text))?;
            ensure(cur.bconsts() == set.bconsts(), format!("base constants changed\n{}", text))?;
            ensure(cur.fconsts() == set.fconsts(), format!("free constants changed\n{}", text))?;
            ensure(inst_points(&cur, &cls) == points, format!("points changed\n{}", text))?;
        }
    }
    ensure(sets >= 50, format!("only {} sets", sets))?;
    Ok(format!("{} sets, {} instantiation steps", sets, steps))
}

fn corpus() -> Vec<String> {
    let mut texts: Vec<String> = ["intro.bsr", "two_bounds.bsr", "unsat_pair.bsr", "free_eq.bsr"].iter().map(|f| text(f)).collect();
    texts.extend(random_texts(31, 200));
    texts
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    let texts = corpus();
    for text in &texts {
        let set = parse(text).map_err(|e| e.to_string())?;
        let normal = normalize(&purify(&set)).map_err(|e| e.to_string())?;
        let g = ground_all(&normal, &GroundOptions::default()).map_err(|e| e.to_string())?;
        let measured = g.combined().len();
        let bound = size_bound(&set, &normal);
        ensure(bound >= measured.into(), format!("len {} exceeds {}\n{}", measured, bound, text))?;
        if let Ok(b) = bound.to_string().parse::<f64>() {
            worst = worst.max(measured as f64 / b);
        }
    }
    Ok(format!("{} instances, largest len/bound ratio {:.3}", texts.len(), worst))
}

fn criterion_6() -> Outcome {
    let texts = corpus();
    let mut fm_clauses = 0;
    for text in &texts {
        let set = purify(&parse(text).map_err(|e| e.to_string())?);
        let normal = normalize(&set).map_err(|e| e.to_string())?;
        let (ok, diags) = is_normal_form(&normal);
        ensure(ok, format!("{:?}\n{}", diags, text))?;
        for clause in &set.clauses {
            let lam = clause.constraints.len();
            let single = ClauseSet::new(set.signature.clone(), vec![clause.clone()]);
            for out in normalize(&single).map_err(|e| e.to_string())?.clauses {
                ensure(out.constraints.len() <= lam * lam, format!("{} grew to {}", clause, out))?;
                fm_clauses += 1;
            }
        }
    }
    Ok(format!("{} instances, {} output clauses within |Λ|²", texts.len(), fm_clauses))
}

fn criterion_7(gate: &mut Gate) -> Outcome {
    for text in corpus() {
        let set = parse(&text).map_err(|e| e.to_string())?;
        for threads in [1, 3] {
            let s = solve(&set, &DecideOptions { threads, ..Default::default() }).map_err(|e| e.to_string())?;
            if let Decision::Sat(m) = &s.decision {
                gate.record(&text, &s.grounding.combined(), m);
            }
        }
    }
    if let Some(first) = gate.failures.first() {
        return Err(format!("{} models rejected, first:\n{}", gate.failures.len(), first));
    }
    Ok(format!("{} sat verdicts, all models verified", gate.sat))
}

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

fn criterion_8() -> Outcome {
    let m: TwoCounterMachine = text("countdown.tcm").parse().map_err(|e: bsr_core::tcm::TcmError| e.to_string())?;
    let mut checked = 0;
    for style in EncodingStyle::ALL {
        let encoded = m.encode(style);
        let p: RawProblem = parse_raw(&encoded).map_err(|e| e.to_string())?;
        ensure(matches!(check_fragment(&p), FragmentClass::OutOfFragment { .. }), format!("{} accepted", style))?;
        let mut consts = BTreeSet::new();
        for c in p.clauses.iter().filter(|c| !c.antecedent.is_empty()) {
            for k in &c.constraints {
                ensure(matches_template(style, k), format!("{}: `{}` has no template", style, k))?;
                numbers(&k.lhs, &mut consts);
                numbers(&k.rhs, &mut consts);
                checked += 1;
            }
        }
        let expected: Option<BTreeSet<Rational>> = match style {
            EncodingStyle::Difference => Some([rat(1)].into()),
            EncodingStyle::Quotient => Some([rat(2)].into()),
            EncodingStyle::Additive => Some([rat(0), rat(1)].into()),
            EncodingStyle::Multiplicative => None,
        };
        if let Some(expected) = expected {
            ensure(consts == expected, format!("{} uses {:?}", style, consts))?;
        }
    }
    let outcome = m.simulate(1000);
    ensure(matches!(outcome, SimOutcome::Halted { steps: 3, .. }), format!("{:?}", outcome))?;
    Ok(format!("4 styles, {} constraints on template, countdown halts in 3 steps", checked))
}

fn criterion_9() -> Outcome {
    let run = |file: &str, extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_bsr"))
            .arg("check")
            .args(extra)
            .arg(data(file))
            .output()
            .map(|o| (o.status.code(), o.stdout, o.stderr))
            .map_err(|e| e.to_string())
    };
    let mut runs = 0;
    for file in ["intro.bsr", "two_bounds.bsr", "unsat_pair.bsr", "free_eq.bsr", "garbage.bsr"] {
        for extra in [&["--model"][..], &["--json"], &["--model", "--threads", "4"]] {
            let a = run(file, extra)?;
            let b = run(file, extra)?;
            ensure(a == b, format!("{} {:?} differs between runs", file, extra))?;
            runs += 2;
        }
    }
    Ok(format!("{} runs over 5 golden files, byte-identical in pairs", runs))
}

fn main() -> ExitCode {
    let mut gate = Gate { sat: 0, failures: Vec::new() };
    let results = [
        criterion_1(&mut gate),
        criterion_2(&mut gate),
        criterion_3(&mut gate),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(&mut gate),
        criterion_8(),
        criterion_9(),
    ];
    let mut failed = 0;
    for (i, r) in results.iter().enumerate() {
        match r {
            Ok(detail) => println!("criterion {}: PASS ({})", i + 1, detail),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL ({})", i + 1, why.lines().next().unwrap_or(""));
                for line in why.lines().skip(1) {
                    println!("    {}", line);
                }
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
