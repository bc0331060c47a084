//! Deciding essentially ground clause sets, models, and the brute-force
//! oracle used to cross-check them.

mod arrangement;
mod congruence;
mod model;
mod oracle;
mod propositional;

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use thiserror::Error;

pub use arrangement::{enumerate_arrangements, eval_by_groups, realize_arrangement, Arrangement, Group};
pub use congruence::{partitions, FreeCongruence};
pub use model::{verify_model, HierarchicModel, ModelDocument, ModelError, ModelValue, ValueDoc, VerifyOutcome};
pub use oracle::{oracle_solve, OracleError, OracleVerdict};

use crate::frontend::{basify, check_fragment, complete, parse_raw, purify, FragmentClass, FrontendError};
use crate::ground::{bindings, ground_all, GroundError, GroundOptions, Grounding};
use crate::normalize::{normalize, NormalizeError};
use crate::syntax::{ClauseSet, ConstSym, FreeAtom, Rel, Sort, Term};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GroundAtom {
    Eq(ConstSym, ConstSym),
    Pred(String, Vec<ConstSym>),
}

/// A clause with every variable replaced by its binding.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundClause {
    pub constraints: Vec<(ConstSym, Rel, ConstSym)>,
    pub antecedent: Vec<GroundAtom>,
    pub succedent: Vec<GroundAtom>,
}

impl GroundClause {
    pub fn is_constraint_only(&self) -> bool {
        self.antecedent.is_empty() && self.succedent.is_empty()
    }

    fn atoms(&self) -> impl Iterator<Item = &GroundAtom> {
        self.antecedent.iter().chain(&self.succedent)
    }

    fn constants(&self) -> impl Iterator<Item = &ConstSym> {
        self.constraints.iter().flat_map(|(l, _, r)| [l, r]).chain(self.atoms().flat_map(|a| match a {
            GroundAtom::Eq(l, r) => vec![l, r],
            GroundAtom::Pred(_, args) => args.iter().collect(),
        }))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("clause `{0}` is not essentially ground")]
    NotEssentiallyGround(String),
    #[error("group order and realized values disagree on `{0}`")]
    Inconsistent(String),
}

/// Substitutes every binding, dropping clauses with a constraint that is
/// false on numerals alone.
pub fn ground_clauses(set: &ClauseSet) -> Result<Vec<GroundClause>, DecideError> {
    let mut out = Vec::with_capacity(set.clauses.len());
    'clauses: for clause in &set.clauses {
        let b = bindings(clause);
        if clause.vars().iter().any(|v| !b.contains_key(v)) {
            return Err(DecideError::NotEssentiallyGround(clause.to_string()));
        }
        let value = |t: &Term| match t {
            Term::Var(v) => b[v].clone(),
            Term::Const(c) => c.clone(),
        };
        let mut g = GroundClause::default();
        for k in &clause.constraints {
            let (l, r) = (value(&k.lhs), value(&k.rhs));
            match (&l, &r) {
                (ConstSym::Numeric(a), ConstSym::Numeric(bb)) => {
                    if !k.rel.holds(a.cmp(bb)) {
                        continue 'clauses;
                    }
                }
                _ if l == r => {
                    if !k.rel.holds(std::cmp::Ordering::Equal) {
                        continue 'clauses;
                    }
                }
                _ => g.constraints.push((l, k.rel, r)),
            }
        }
        let atom = |a: &FreeAtom| match a {
            FreeAtom::Eq(l, r) => GroundAtom::Eq(value(l), value(r)),
            FreeAtom::Pred { symbol, args } => GroundAtom::Pred(symbol.clone(), args.iter().map(value).collect()),
        };
        g.antecedent = clause.antecedent.iter().map(atom).collect();
        g.succedent = clause.succedent.iter().map(atom).collect();
        out.push(g);
    }
    Ok(out)
}

pub fn base_constants(clauses: &[GroundClause]) -> BTreeSet<ConstSym> {
    clauses.iter().flat_map(GroundClause::constants).filter(|c| c.sort() == Sort::Base).cloned().collect()
}

fn free_constants(clauses: &[GroundClause]) -> BTreeSet<ConstSym> {
    clauses.iter().flat_map(GroundClause::constants).filter(|c| c.sort() == Sort::Free).cloned().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Sat(HierarchicModel),
    Unsat,
    /// A resource cap was hit before the search finished.
    Unknown(String),
}

impl Decision {
    pub fn verdict(&self) -> &'static str {
        match self {
            Decision::Sat(_) => "sat",
            Decision::Unsat => "unsat",
            Decision::Unknown(_) => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecideOptions {
    pub max_arrangements: Option<u64>,
    /// Caps the congruences tried, summed over all arrangements.
    pub max_partitions: Option<u64>,
    pub threads: usize,
    pub max_ground_len: Option<u128>,
}

impl Default for DecideOptions {
    fn default() -> DecideOptions {
        DecideOptions { max_arrangements: None, max_partitions: None, threads: 1, max_ground_len: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum ArgKey {
    Group(usize),
    Class(ConstSym),
}

type AtomKey = (String, Vec<ArgKey>);

enum Outcome {
    Model(HierarchicModel),
    Exhausted,
    OverBudget,
}

struct Context<'a> {
    clauses: &'a [GroundClause],
    fconsts: Vec<ConstSym>,
    predicates: Vec<String>,
}

impl Context<'_> {
    /// Tries congruences for one arrangement; also returns how many were tried.
    fn evaluate(&self, arr: &Arrangement, cap: Option<u64>) -> Result<(Outcome, u64), DecideError> {
        let index = arr.index();
        let live: Vec<&GroundClause> = self
            .clauses
            .iter()
            .filter(|c| c.constraints.iter().all(|(l, r, rr)| eval_by_groups(&index, l, *r, rr)))
            .collect();
        let mut tried = 0u64;
        for rgs in partitions(self.fconsts.len()) {
            if cap.is_some_and(|c| tried >= c) {
                return Ok((Outcome::OverBudget, tried));
            }
            tried += 1;
            let congruence = FreeCongruence::from_rgs(&self.fconsts, &rgs);
            if let Some(model) = self.residue(arr, &index, &live, congruence)? {
                return Ok((Outcome::Model(model), tried));
            }
        }
        Ok((Outcome::Exhausted, tried))
    }

    fn residue(
        &self,
        arr: &Arrangement,
        index: &BTreeMap<ConstSym, usize>,
        live: &[&GroundClause],
        congruence: FreeCongruence,
    ) -> Result<Option<HierarchicModel>, DecideError> {
        let rep = |c: &ConstSym| congruence.rep_of(c).expect("free constant").clone();
        let key = |symbol: &String, args: &[ConstSym]| -> AtomKey {
            let args = args
                .iter()
                .map(|c| if c.sort() == Sort::Base { ArgKey::Group(index[c]) } else { ArgKey::Class(rep(c)) })
                .collect();
            (symbol.clone(), args)
        };
        let mut keyed: Vec<Vec<(bool, AtomKey)>> = Vec::new();
        'clauses: for c in live {
            let mut lits = Vec::new();
            for a in &c.antecedent {
                match a {
                    GroundAtom::Eq(l, r) if rep(l) == rep(r) => {}
                    GroundAtom::Eq(..) => continue 'clauses,
                    GroundAtom::Pred(p, args) => lits.push((false, key(p, args))),
                }
            }
            for a in &c.succedent {
                match a {
                    GroundAtom::Eq(l, r) if rep(l) == rep(r) => continue 'clauses,
                    GroundAtom::Eq(..) => {}
                    GroundAtom::Pred(p, args) => lits.push((true, key(p, args))),
                }
            }
            if lits.is_empty() {
                return Ok(None);
            }
            keyed.push(lits);
        }
        let atoms: BTreeSet<&AtomKey> = keyed.iter().flatten().map(|(_, k)| k).collect();
        let ids: BTreeMap<&AtomKey, i32> = atoms.iter().enumerate().map(|(i, k)| (*k, i as i32 + 1)).collect();
        let cnf: Vec<Vec<propositional::Lit>> =
            keyed.iter().map(|c| c.iter().map(|(pos, k)| if *pos { ids[k] } else { -ids[k] }).collect()).collect();
        let Some(assignment) = propositional::solve(atoms.len(), &cnf) else {
            return Ok(None);
        };
        let values = arrangement::group_values(arr);
        self.check_consistency(index, &values)?;
        let mut extensions: BTreeMap<String, BTreeSet<Vec<ModelValue>>> =
            self.predicates.iter().map(|p| (p.clone(), BTreeSet::new())).collect();
        for ((symbol, args), value) in atoms.iter().zip(assignment) {
            if value {
                let tuple = args
                    .iter()
                    .map(|a| match a {
                        ArgKey::Group(g) => ModelValue::Real(values[*g].clone()),
                        ArgKey::Class(c) => ModelValue::Class(c.clone()),
                    })
                    .collect();
                extensions.entry(symbol.clone()).or_default().insert(tuple);
            }
        }
        let base_values = index
            .iter()
            .filter(|(c, _)| c.as_numeric().is_none())
            .map(|(c, &g)| (c.clone(), values[g].clone()))
            .collect();
        Ok(Some(HierarchicModel { base_values, congruence, extensions }))
    }

    fn check_consistency(
        &self,
        index: &BTreeMap<ConstSym, usize>,
        values: &[crate::syntax::Rational],
    ) -> Result<(), DecideError> {
        for c in self.clauses {
            for (l, rel, r) in &c.constraints {
                let by_value = rel.holds(values[index[l]].cmp(&values[index[r]]));
                if by_value != eval_by_groups(index, l, *rel, r) {
                    return Err(DecideError::Inconsistent(format!("{} {} {}", l, rel, r)));
                }
            }
        }
        Ok(())
    }
}

struct Driver<'a> {
    ctx: Context<'a>,
    opts: &'a DecideOptions,
    partitions_used: u64,
    pending: Vec<Arrangement>,
}

impl Driver<'_> {
    fn run_batch(&self, batch: &[Arrangement], cap: Option<u64>) -> Vec<Result<(Outcome, u64), DecideError>> {
        let threads = self.opts.threads.max(1).min(batch.len());
        if threads <= 1 {
            return batch.iter().map(|a| self.ctx.evaluate(a, cap)).collect();
        }
        let mut slots: Vec<Option<Result<(Outcome, u64), DecideError>>> = batch.iter().map(|_| None).collect();
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    let ctx = &self.ctx;
                    s.spawn(move || {
                        (t..batch.len()).step_by(threads).map(|i| (i, ctx.evaluate(&batch[i], cap))).collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (i, r) in h.join().expect("worker panicked") {
                    slots[i] = Some(r);
                }
            }
        });
        slots.into_iter().map(|r| r.expect("evaluated")).collect()
    }

    /// Evaluates pending arrangements and merges the results in enumeration
    /// order, so the outcome matches a sequential run.
    fn flush(&mut self) -> Result<Option<Decision>, DecideError> {
        let batch = std::mem::take(&mut self.pending);
        let cap = self.opts.max_partitions.map(|m| m - self.partitions_used);
        for r in self.run_batch(&batch, cap) {
            let (outcome, used) = r?;
            let over = match self.opts.max_partitions {
                Some(max) => matches!(outcome, Outcome::OverBudget) || self.partitions_used + used > max,
                None => false,
            };
            if over {
                return Ok(Some(Decision::Unknown(format!(
                    "partition budget of {} exhausted",
                    self.opts.max_partitions.unwrap_or(0)
                ))));
            }
            self.partitions_used += used;
            if let Outcome::Model(m) = outcome {
                return Ok(Some(Decision::Sat(m)));
            }
        }
        Ok(None)
    }
}

/// Decides an essentially ground clause set by enumerating arrangements of
/// its base constants and congruences of its free constants.
pub fn decide_ground(set: &ClauseSet, opts: &DecideOptions) -> Result<Decision, DecideError> {
    let clauses = ground_clauses(set)?;
    let mut fconsts = free_constants(&clauses);
    fconsts.extend(set.fconsts());
    let ctx = Context {
        clauses: &clauses,
        fconsts: fconsts.into_iter().collect(),
        predicates: set.signature.predicates.keys().cloned().collect(),
    };
    let batch_size = if opts.threads > 1 { opts.threads * 4 } else { 1 };
    let mut driver = Driver { ctx, opts, partitions_used: 0, pending: Vec::new() };
    let mut seen = 0u64;
    let mut result: Result<Option<Decision>, DecideError> = Ok(None);
    let _ = enumerate_arrangements(&clauses, |arr| {
        seen += 1;
        if opts.max_arrangements.is_some_and(|m| seen > m) {
            result = driver.flush().map(|d| {
                d.or_else(|| {
                    Some(Decision::Unknown(format!(
                        "arrangement budget of {} exhausted",
                        opts.max_arrangements.unwrap_or(0)
                    )))
                })
            });
            return ControlFlow::Break(());
        }
        driver.pending.push(arr.clone());
        if driver.pending.len() >= batch_size {
            result = driver.flush();
            if !matches!(result, Ok(None)) {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    if let Some(d) = result? {
        return Ok(d);
    }
    Ok(driver.flush()?.unwrap_or(Decision::Unsat))
}

/// The result of the full pipeline together with its intermediate stages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub decision: Decision,
    pub normalized: ClauseSet,
    pub grounding: Grounding,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error("outside the decidable fragment: {reason} in `{offending}`")]
    Fragment { reason: String, offending: String },
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Decide(#[from] DecideError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("model check failed on `{0}`")]
    ModelRejected(String),
}

/// Purifies, normalizes, grounds and decides `set`. A model is only returned
/// after it has been checked against the ground clauses and axioms.
pub fn solve(set: &ClauseSet, opts: &DecideOptions) -> Result<Solution, SolveError> {
    let normalized = normalize(&purify(set))?;
    let grounding = ground_all(&normalized, &GroundOptions { max_len: opts.max_ground_len })?;
    let combined = grounding.combined();
    let decision = decide_ground(&combined, opts)?;
    if let Decision::Sat(model) = &decision {
        if let VerifyOutcome::Violated { clause } = verify_model(&combined, model)? {
            return Err(SolveError::ModelRejected(clause.to_string()));
        }
    }
    Ok(Solution { decision, normalized, grounding })
}

/// Parses problem text, rejects it if it is outside the fragment, and
/// solves it.
pub fn solve_text(text: &str, opts: &DecideOptions) -> Result<Solution, SolveError> {
    let raw = parse_raw(text).map_err(FrontendError::from)?;
    if let FragmentClass::OutOfFragment { reason, offending } = check_fragment(&raw) {
        return Err(SolveError::Fragment { reason, offending });
    }
    let set = complete(basify(&raw).map_err(FrontendError::from)?);
    solve(&set, opts)
}
