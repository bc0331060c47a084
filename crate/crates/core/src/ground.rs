//! Instantiation of base and free variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use num_bigint::BigUint;
use thiserror::Error;

use crate::analysis::{alpha_axioms, ap_classes, axiom_closure, inst_points, ApClassPartition, InstPointSet};
use crate::frontend::print_signature;
use crate::syntax::{
    dedup_variants, rename_apart, simplify_clauses, AtomicConstraint, Clause, ClauseSet, ConstSym, FreeAtom, Rel,
    Sort, Term, Var,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("cannot bind {var} of sort {var_sort} to {value} of sort {value_sort}")]
    Sort { var: String, var_sort: Sort, value: String, value_sort: Sort },
    #[error(
        "grounding would have length {predicted}, above the cap of {cap} \
         (worst-case bound 3*len(N')*len(N)^len(N) = {bound})"
    )]
    TooLarge { predicted: u128, cap: u128, bound: String },
}

/// `Λσ, x = xσ || (Γ -> Δ)σ` with base bindings recorded as constraints and
/// free bindings substituted.
pub fn apply_subst(clause: &Clause, sigma: &BTreeMap<Var, ConstSym>) -> Result<Clause, GroundError> {
    for (v, c) in sigma {
        if v.sort != c.sort() {
            return Err(GroundError::Sort {
                var: v.name.clone(),
                var_sort: v.sort,
                value: c.to_string(),
                value_sort: c.sort(),
            });
        }
    }
    let mut constraints: Vec<AtomicConstraint> = clause
        .constraints
        .iter()
        .map(|k| {
            sigma
                .iter()
                .filter(|(v, _)| v.sort == Sort::Base)
                .fold(k.clone(), |k, (v, c)| if k.vars().any(|w| w == v) { k.substitute(v, c) } else { k })
        })
        .collect();
    for v in clause.vars() {
        if let (Sort::Base, Some(c)) = (v.sort, sigma.get(&v)) {
            constraints.push(AtomicConstraint::new(v.clone(), Rel::Eq, c.clone()));
        }
    }
    let mut sub = |t: &Term| match t {
        Term::Var(v) if v.sort == Sort::Free => sigma.get(v).map_or_else(|| t.clone(), |c| Term::Const(c.clone())),
        t => t.clone(),
    };
    Ok(Clause {
        id: clause.id,
        constraints,
        antecedent: clause.antecedent.iter().map(|a| a.map_terms(&mut sub)).collect(),
        succedent: clause.succedent.iter().map(|a| a.map_terms(&mut sub)).collect(),
    })
}

/// All tuples picking one element from each domain, first coordinate slowest.
fn product<T: Clone>(domains: &[Vec<T>]) -> Vec<Vec<T>> {
    domains.iter().fold(vec![vec![]], |acc, d| {
        acc.iter()
            .flat_map(|prefix| {
                d.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect()
    })
}

fn instances(clause: &Clause, domains: Vec<(Var, Vec<ConstSym>)>) -> Vec<Clause> {
    let (vars, doms): (Vec<Var>, Vec<Vec<ConstSym>>) = domains.into_iter().unzip();
    product(&doms)
        .into_iter()
        .map(|tuple| {
            let sigma = vars.iter().cloned().zip(tuple).collect();
            apply_subst(clause, &sigma).expect("domains are sort-correct")
        })
        .collect()
}

fn is_bound(clause: &Clause, v: &Var) -> bool {
    clause.constraints.iter().any(|k| k.rel == Rel::Eq && k.lhs.as_var() == Some(v) && k.rhs.as_const().is_some())
}

/// Base variables with a class and no binding yet, with their points.
fn base_domains(clause: &Clause, classes: &ApClassPartition, points: &InstPointSet) -> Vec<(Var, Vec<ConstSym>)> {
    clause
        .vars()
        .into_iter()
        .filter(|v| v.sort == Sort::Base && !is_bound(clause, v))
        .filter_map(|v| {
            let pts = points.get(classes.class_of_var(clause, &v)?)?;
            Some((v, pts.iter().cloned().collect()))
        })
        .collect()
}

fn free_domains(clause: &Clause, fconsts: &[ConstSym]) -> Vec<(Var, Vec<ConstSym>)> {
    clause.vars().into_iter().filter(|v| v.sort == Sort::Free).map(|v| (v, fconsts.to_vec())).collect()
}

fn without_present(axioms: Vec<Clause>, present: &[Clause]) -> Vec<Clause> {
    let mut seen: BTreeSet<Clause> = present.iter().map(Clause::canonical).collect();
    axioms.into_iter().filter(|a| seen.insert(a.canonical())).collect()
}

/// Replaces each clause by its instances over the instantiation points of
/// its base variables and adds the axioms for the points used.
pub fn instantiate_base(set: &ClauseSet, classes: &ApClassPartition, points: &InstPointSet) -> ClauseSet {
    let mut clauses = Vec::new();
    let mut used = BTreeSet::new();
    for c in &set.clauses {
        let doms = base_domains(c, classes, points);
        for (_, d) in &doms {
            used.extend(d.iter().cloned());
        }
        clauses.extend(instances(c, doms));
    }
    let axioms = alpha_axioms(&used, &set.bconsts());
    clauses.extend(without_present(axioms, &clauses));
    ClauseSet::new(set.signature.clone(), rename_apart(clauses, &set.reserved_names()))
}

/// Replaces each clause by its instances over the free constants.
pub fn instantiate_free(set: &ClauseSet) -> ClauseSet {
    let fconsts: Vec<ConstSym> = set.fconsts().into_iter().collect();
    let clauses = set.clauses.iter().flat_map(|c| instances(c, free_domains(c, &fconsts))).collect();
    ClauseSet::new(set.signature.clone(), rename_apart(clauses, &set.reserved_names()))
}

/// The first base variable (by clause, then occurrence) that sits at a
/// predicate argument and has no binding `x = d`.
pub fn unbound_base_var(set: &ClauseSet, classes: &ApClassPartition) -> Option<(usize, Var)> {
    set.clauses.iter().enumerate().find_map(|(i, c)| {
        c.vars()
            .into_iter()
            .find(|v| v.sort == Sort::Base && classes.class_of_var(c, v).is_some() && !is_bound(c, v))
            .map(|v| (i, v))
    })
}

/// Instantiates a single base variable of one clause and adds the
/// (unsimplified) axioms for the points of its class.
pub fn instantiate_base_var(
    set: &ClauseSet,
    classes: &ApClassPartition,
    points: &InstPointSet,
    clause: usize,
    var: &Var,
) -> ClauseSet {
    let c = &set.clauses[clause];
    let pts: BTreeSet<ConstSym> =
        classes.class_of_var(c, var).and_then(|k| points.get(k)).cloned().unwrap_or_default();
    let mut clauses: Vec<Clause> = set.clauses[..clause].to_vec();
    clauses.extend(instances(c, vec![(var.clone(), pts.iter().cloned().collect())]));
    clauses.extend(set.clauses[clause + 1..].iter().cloned());
    let axioms = alpha_axioms(&pts, &set.bconsts());
    clauses.extend(without_present(axioms, &clauses));
    ClauseSet::new(set.signature.clone(), rename_apart(clauses, &set.reserved_names()))
}

/// The essentially ground instances `N''` and the alpha axioms `Ax`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grounding {
    pub ground: ClauseSet,
    pub axioms: ClauseSet,
}

impl Grounding {
    /// `N'' ∪ Ax` as one clause set.
    pub fn combined(&self) -> ClauseSet {
        let mut clauses = self.ground.clauses.clone();
        clauses.extend(self.axioms.clauses.iter().cloned());
        ClauseSet::new(self.ground.signature.clone(), clauses)
    }

    /// Problem text with instances folded and each axiom preceded by a
    /// `# axiom` line.
    pub fn to_text(&self) -> String {
        let mut out = print_signature(&self.ground.signature);
        for c in &self.ground.clauses {
            let _ = writeln!(out, "{}", display_folded(c));
        }
        for c in &self.axioms.clauses {
            let _ = writeln!(out, "# axiom\n{}", c);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GroundOptions {
    /// Refuse groundings longer than this.
    pub max_len: Option<u128>,
}

/// Length the all-at-once grounding can reach before simplification.
pub fn predicted_len(set: &ClauseSet, classes: &ApClassPartition, points: &InstPointSet) -> u128 {
    let nf = set.fconsts().len().max(1) as u128;
    set.clauses
        .iter()
        .map(|c| {
            let doms = base_domains(c, classes, points);
            let nfree = free_domains(c, &[]).len() as u32;
            let n: u128 = doms.iter().map(|(_, d)| d.len() as u128).product::<u128>() * nf.saturating_pow(nfree);
            n.saturating_mul(c.len() as u128 + 2 * doms.len() as u128)
        })
        .fold(0u128, u128::saturating_add)
}

/// `3·len(N')·len(N)^len(N)` for input `N` and normal form `N'`.
pub fn size_bound(input: &ClauseSet, normal: &ClauseSet) -> BigUint {
    let n = BigUint::from(input.len());
    BigUint::from(3u32) * BigUint::from(normal.len()) * n.pow(input.len() as u32)
}

fn ensure_free_constant(mut set: ClauseSet) -> ClauseSet {
    let has_free_var = set.clauses.iter().any(|c| c.vars().iter().any(|v| v.sort == Sort::Free));
    if has_free_var && set.fconsts().is_empty() {
        set = crate::frontend::complete(set);
    }
    set
}

/// All-at-once instantiation of a normal-form set with eager ground
/// simplification.
pub fn ground_all(set: &ClauseSet, opts: &GroundOptions) -> Result<Grounding, GroundError> {
    let set = ensure_free_constant(set.clone());
    let classes = ap_classes(&set);
    let points = inst_points(&set, &classes);
    if let Some(cap) = opts.max_len {
        let predicted = predicted_len(&set, &classes, &points);
        if predicted > cap {
            return Err(GroundError::TooLarge { predicted, cap, bound: size_bound(&set, &set).to_string() });
        }
    }
    let fconsts: Vec<ConstSym> = set.fconsts().into_iter().collect();
    let mut clauses = Vec::new();
    for c in &set.clauses {
        for inst in instances(c, base_domains(c, &classes, &points)) {
            let doms = free_domains(&inst, &fconsts);
            clauses.extend(instances(&inst, doms));
        }
    }
    let clauses = dedup_variants(simplify_clauses(clauses));
    let ground = ClauseSet::new(set.signature.clone(), rename_apart(clauses, &set.reserved_names()));
    let mut alpha = points.alpha_consts();
    alpha.extend(ground.alpha_consts());
    let axioms = without_present(axiom_closure(&alpha, &set.bconsts()), &ground.clauses);
    Ok(Grounding { axioms: ClauseSet::new(set.signature.clone(), axioms), ground })
}

/// The binding `x = d` of each bound base variable (first one wins).
pub fn bindings(clause: &Clause) -> BTreeMap<Var, ConstSym> {
    let mut out = BTreeMap::new();
    for k in &clause.constraints {
        if let (Term::Var(v), Rel::Eq, Term::Const(d)) = (&k.lhs, k.rel, &k.rhs) {
            out.entry(v.clone()).or_insert_with(|| d.clone());
        }
    }
    out
}

/// Renders an instance with its bindings substituted into the rest of the
/// clause, the way instances are usually displayed.
pub fn display_folded(clause: &Clause) -> String {
    let b = bindings(clause);
    let mut dropped = BTreeSet::new();
    let constraints = clause
        .constraints
        .iter()
        .filter(|k| match (&k.lhs, k.rel, &k.rhs) {
            (Term::Var(v), Rel::Eq, Term::Const(d)) if b.get(v) == Some(d) => !dropped.insert(v.clone()),
            _ => true,
        })
        .map(|k| b.iter().fold(k.clone(), |k, (v, d)| if k.vars().any(|w| w == v) { k.substitute(v, d) } else { k }))
        .collect();
    let mut sub = |t: &Term| match t {
        Term::Var(v) => b.get(v).map_or_else(|| t.clone(), |d| Term::Const(d.clone())),
        t => t.clone(),
    };
    let folded = Clause {
        id: clause.id,
        constraints,
        antecedent: clause.antecedent.iter().map(|a| a.map_terms(&mut sub)).collect::<Vec<FreeAtom>>(),
        succedent: clause.succedent.iter().map(|a| a.map_terms(&mut sub)).collect(),
    };
    folded.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;
    use crate::frontend::tests_support::{EXAMPLE_3_6, INTRO};
    use crate::normalize::normalize;

    fn eps(n: i64) -> ConstSym {
        ConstSym::eps(ConstSym::int(n))
    }

    #[test]
    fn example_3_6_substitution() {
        let s = parse(EXAMPLE_3_6).unwrap();
        let sigma = [(Var::base("x"), eps(2))].into();
        let c = apply_subst(&s.clauses[0], &sigma).unwrap();
        assert_eq!(c.to_string(), "@eps(2) > 2, z = 4, x = @eps(2) || Q(x, z) -> T(x).");
        assert_eq!(apply_subst(&s.clauses[0], &BTreeMap::new()).unwrap(), s.clauses[0]);
    }

    #[test]
    fn free_substitution() {
        let s = parse(INTRO).unwrap();
        let sigma = [(Var::free("u1"), ConstSym::free("c"))].into();
        let c = apply_subst(&s.clauses[0], &sigma).unwrap();
        assert_eq!(c.to_string(), "x2 != 5 || R(x1) -> Q(c, x2).");
        let bad = [(Var::free("u1"), ConstSym::int(1))].into();
        assert!(matches!(apply_subst(&s.clauses[0], &bad), Err(GroundError::Sort { .. })));
    }

    #[test]
    fn example_3_6_iterative_step() {
        let s = parse(EXAMPLE_3_6).unwrap();
        let classes = ap_classes(&s);
        let points = inst_points(&s, &classes);
        let next = instantiate_base_var(&s, &classes, &points, 0, &Var::base("x"));
        let texts: Vec<String> = next.clauses.iter().map(|c| c.to_string()).collect();
        assert_eq!(texts[0], "@minf > 2, z = 4, x = @minf || Q(x, z) -> T(x).");
        assert_eq!(texts[1], "@eps(2) > 2, z_1 = 4, x_1 = @eps(2) || Q(x_1, z_1) -> T(x_1).");
        assert!(texts.contains(&"@eps(2) <= 2 || ->.".to_string()));
        assert!(texts.contains(&"2 < 4, @eps(2) >= 4 || ->.".to_string()));
    }

    #[test]
    fn intro_grounding() {
        let s = normalize(&parse(INTRO).unwrap()).unwrap();
        let g = ground_all(&s, &GroundOptions::default()).unwrap();
        let mut inst: Vec<String> = g.ground.clauses.iter().map(display_folded).collect();
        inst.sort();
        let mut expected = vec![
            "@eps(5) != 5 || R(@minf) -> Q(c, @eps(5)).",
            "@minf != 5 || R(@minf) -> Q(c, @minf).",
            "@minf < 7, @eps(5) <= 2 || -> Q(c, @eps(5)), R(@minf).",
            "@minf < 7, @minf <= 2 || -> Q(c, @minf), R(@minf).",
        ];
        expected.sort();
        assert_eq!(inst, expected);
        assert!(g.ground.flags().essentially_ground);
        let ax: Vec<String> = g.axioms.clauses.iter().map(|c| c.to_string()).collect();
        assert_eq!(ax, [
            "@minf >= 2 || ->.",
            "@minf >= 5 || ->.",
            "@minf >= 7 || ->.",
            "@eps(5) <= 5 || ->.",
            "@eps(5) >= 7 || ->."
        ]);
    }

    #[test]
    fn unsat_pair_grounding() {
        let s = normalize(&parse("pred T : R.\nx < 3 || -> T(x).\ny >= 0 || T(y) ->.").unwrap()).unwrap();
        let g = ground_all(&s, &GroundOptions::default()).unwrap();
        let inst: Vec<String> = g.ground.clauses.iter().map(display_folded).collect();
        assert_eq!(inst[..4], [
            "|| -> T(0).",
            "@minf < 3 || -> T(@minf).",
            "|| T(0) ->.",
            "@minf >= 0 || T(@minf) ->."
        ]);
        let ax: Vec<String> = g.axioms.clauses.iter().map(|c| c.to_string()).collect();
        assert_eq!(ax, ["@minf >= 0 || ->.", "@minf >= 3 || ->."]);
    }

    #[test]
    fn ground_input_unchanged() {
        let s = normalize(&parse("pred P : S.\nconst c : S.\n|| -> P(c).\n|| P(c) ->.").unwrap()).unwrap();
        let g = ground_all(&s, &GroundOptions::default()).unwrap();
        assert_eq!(g.ground.clauses, s.clauses);
        assert!(g.axioms.is_empty());
    }

    #[test]
    fn free_instances() {
        let s = parse("pred P : S.\nconst a : S.\nconst b : S.\n|| -> P(u).\n|| P(a), P(b) ->.").unwrap();
        let g = instantiate_free(&s);
        assert_eq!(g.clauses.len(), 3);
        assert_eq!(g.clauses[0].to_string(), "|| -> P(a).");
    }

    #[test]
    fn cap_is_enforced() {
        let s = normalize(&parse(INTRO).unwrap()).unwrap();
        let e = ground_all(&s, &GroundOptions { max_len: Some(3) }).unwrap_err();
        assert!(matches!(e, GroundError::TooLarge { cap: 3, .. }));
    }

    #[test]
    fn size_bound_holds() {
        let input = parse(INTRO).unwrap();
        let n = normalize(&input).unwrap();
        let g = ground_all(&n, &GroundOptions::default()).unwrap();
        assert!(BigUint::from(g.ground.len()) <= size_bound(&input, &n));
    }
}
