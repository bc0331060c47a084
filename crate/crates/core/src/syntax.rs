//! Sorted terms, constraints, clauses and clause sets.
//!
//! A clause `Λ || Γ -> Δ` reads as `(⋀Λ ∧ ⋀Γ) → ⋁Δ` with every variable
//! universally quantified. The constraint part `Λ` holds simple bounds over
//! the reals, the free part `Γ -> Δ` holds uninterpreted atoms.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;

/// Exact rational numbers; the only numbers the pipeline ever touches.
pub type Rational = BigRational;

/// Builds a rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Builds the rational `n/d`. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    /// The base sort, interpreted as the reals.
    Base,
    /// The free, uninterpreted sort.
    Free,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Base => write!(f, "R"),
            Sort::Free => write!(f, "S"),
        }
    }
}

/// Constant symbols of both sorts.
///
/// `AlphaMinf` stands for a sufficiently small real, `AlphaEps(d)` for a real
/// slightly above `d`. Their meaning is pinned by axiom clauses, not by the
/// type.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstSym {
    Numeric(Rational),
    Skolem(String),
    AlphaMinf,
    AlphaEps(Box<ConstSym>),
    Free(String),
}

impl ConstSym {
    pub fn int(n: i64) -> ConstSym {
        ConstSym::Numeric(rat(n))
    }

    pub fn eps(inner: ConstSym) -> ConstSym {
        ConstSym::AlphaEps(Box::new(inner))
    }

    pub fn free(name: &str) -> ConstSym {
        ConstSym::Free(name.to_string())
    }

    pub fn skolem(name: &str) -> ConstSym {
        ConstSym::Skolem(name.to_string())
    }

    pub fn sort(&self) -> Sort {
        match self {
            ConstSym::Free(_) => Sort::Free,
            _ => Sort::Base,
        }
    }

    pub fn is_alpha(&self) -> bool {
        matches!(self, ConstSym::AlphaMinf | ConstSym::AlphaEps(_))
    }

    /// Numeric or Skolem base constant (the set `Ω_LA` without `α` symbols).
    pub fn is_plain_base(&self) -> bool {
        matches!(self, ConstSym::Numeric(_) | ConstSym::Skolem(_))
    }

    pub fn as_numeric(&self) -> Option<&Rational> {
        match self {
            ConstSym::Numeric(q) => Some(q),
            _ => None,
        }
    }

    /// Identifier for declared constants (Skolem and free).
    pub fn name(&self) -> Option<&str> {
        match self {
            ConstSym::Skolem(n) | ConstSym::Free(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for ConstSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstSym::Numeric(q) => write!(f, "{}", q),
            ConstSym::Skolem(n) | ConstSym::Free(n) => write!(f, "{}", n),
            ConstSym::AlphaMinf => write!(f, "@minf"),
            ConstSym::AlphaEps(d) => write!(f, "@eps({})", d),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: String,
    pub sort: Sort,
}

impl Var {
    pub fn base(name: &str) -> Var {
        Var { name: name.to_string(), sort: Sort::Base }
    }

    pub fn free(name: &str) -> Var {
        Var { name: name.to_string(), sort: Sort::Free }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl Rel {
    pub const ALL: [Rel; 6] = [Rel::Lt, Rel::Le, Rel::Eq, Rel::Ne, Rel::Ge, Rel::Gt];

    /// The relation obtained by swapping both sides: `a ◁ b` iff `b flip(◁) a`.
    pub fn flip(self) -> Rel {
        match self {
            Rel::Lt => Rel::Gt,
            Rel::Le => Rel::Ge,
            Rel::Ge => Rel::Le,
            Rel::Gt => Rel::Lt,
            r => r,
        }
    }

    pub fn negate(self) -> Rel {
        match self {
            Rel::Lt => Rel::Ge,
            Rel::Le => Rel::Gt,
            Rel::Eq => Rel::Ne,
            Rel::Ne => Rel::Eq,
            Rel::Ge => Rel::Lt,
            Rel::Gt => Rel::Le,
        }
    }

    /// Whether `a ◁ b` holds given `a.cmp(b)`.
    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            Rel::Lt => ord == Ordering::Less,
            Rel::Le => ord != Ordering::Greater,
            Rel::Eq => ord == Ordering::Equal,
            Rel::Ne => ord != Ordering::Equal,
            Rel::Ge => ord != Ordering::Less,
            Rel::Gt => ord == Ordering::Greater,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ne => "!=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Const(ConstSym),
}

impl Term {
    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(v) => v.sort,
            Term::Const(c) => c.sort(),
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }

    pub fn as_const(&self) -> Option<&ConstSym> {
        match self {
            Term::Const(c) => Some(c),
            Term::Var(_) => None,
        }
    }

    pub fn is_alpha(&self) -> bool {
        matches!(self, Term::Const(c) if c.is_alpha())
    }

    fn substitute(&self, var: &Var, by: &Term) -> Term {
        match self {
            Term::Var(v) if v == var => by.clone(),
            t => t.clone(),
        }
    }
}

impl From<Var> for Term {
    fn from(v: Var) -> Term {
        Term::Var(v)
    }
}

impl From<ConstSym> for Term {
    fn from(c: ConstSym) -> Term {
        Term::Const(c)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{}", v),
            Term::Const(c) => write!(f, "{}", c),
        }
    }
}

/// A base-sort comparison `lhs ◁ rhs`.
///
/// Admissible shapes are `c ◁ d`, `x ◁ d`, `α ◁ d`, `x = α` and `α ◁ α'`.
/// The type itself admits more so that ill-formed inputs can be diagnosed;
/// see [`wellformed`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomicConstraint {
    pub lhs: Term,
    pub rel: Rel,
    pub rhs: Term,
}

impl AtomicConstraint {
    pub fn new(lhs: impl Into<Term>, rel: Rel, rhs: impl Into<Term>) -> AtomicConstraint {
        AtomicConstraint { lhs: lhs.into(), rel, rhs: rhs.into() }
    }

    /// Swaps sides when needed so that variables and `α` constants sit on the
    /// left, matching the admissible shapes.
    pub fn oriented(self) -> AtomicConstraint {
        let swap = match (&self.lhs, &self.rhs) {
            (Term::Const(_), Term::Var(_)) => true,
            (Term::Const(l), Term::Const(r)) => !l.is_alpha() && r.is_alpha(),
            _ => false,
        };
        if swap {
            AtomicConstraint { lhs: self.rhs, rel: self.rel.flip(), rhs: self.lhs }
        } else {
            self
        }
    }

    /// The bounded variable, if any.
    pub fn var(&self) -> Option<&Var> {
        self.lhs.as_var()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.lhs.as_var().into_iter().chain(self.rhs.as_var())
    }

    pub fn is_ground(&self) -> bool {
        self.lhs.as_var().is_none() && self.rhs.as_var().is_none()
    }

    pub fn substitute(&self, var: &Var, by: &ConstSym) -> AtomicConstraint {
        let by = Term::Const(by.clone());
        AtomicConstraint {
            lhs: self.lhs.substitute(var, &by),
            rel: self.rel,
            rhs: self.rhs.substitute(var, &by),
        }
        .oriented()
    }

    /// Decides ground constraints whose truth does not depend on the model:
    /// comparisons between numerals and comparisons of a symbol with itself.
    pub fn eval_syntactic(&self) -> Option<bool> {
        match (&self.lhs, &self.rhs) {
            (Term::Const(ConstSym::Numeric(a)), Term::Const(ConstSym::Numeric(b))) => {
                Some(self.rel.holds(a.cmp(b)))
            }
            (Term::Const(a), Term::Const(b)) if a == b => Some(self.rel.holds(Ordering::Equal)),
            _ => None,
        }
    }
}

impl fmt::Display for AtomicConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.rel, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FreeAtom {
    /// Free-sort equation `s ~ t`.
    Eq(Term, Term),
    Pred { symbol: String, args: Vec<Term> },
}

impl FreeAtom {
    pub fn pred(symbol: &str, args: Vec<Term>) -> FreeAtom {
        FreeAtom::Pred { symbol: symbol.to_string(), args }
    }

    pub fn terms(&self) -> Box<dyn Iterator<Item = &Term> + '_> {
        match self {
            FreeAtom::Eq(l, r) => Box::new([l, r].into_iter()),
            FreeAtom::Pred { args, .. } => Box::new(args.iter()),
        }
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> FreeAtom {
        match self {
            FreeAtom::Eq(l, r) => FreeAtom::Eq(f(l), f(r)),
            FreeAtom::Pred { symbol, args } => {
                FreeAtom::Pred { symbol: symbol.clone(), args: args.iter().map(|t| f(t)).collect() }
            }
        }
    }
}

impl fmt::Display for FreeAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreeAtom::Eq(l, r) => write!(f, "{} ~ {}", l, r),
            FreeAtom::Pred { symbol, args } if args.is_empty() => write!(f, "{}", symbol),
            FreeAtom::Pred { symbol, args } => {
                write!(f, "{}(", symbol)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", a)?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A constrained clause `Λ || Γ -> Δ`. Multisets are kept as sequences.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Clause {
    pub id: usize,
    pub constraints: Vec<AtomicConstraint>,
    pub antecedent: Vec<FreeAtom>,
    pub succedent: Vec<FreeAtom>,
}

impl Clause {
    pub fn new(
        constraints: Vec<AtomicConstraint>,
        antecedent: Vec<FreeAtom>,
        succedent: Vec<FreeAtom>,
    ) -> Clause {
        Clause { id: 0, constraints, antecedent, succedent }
    }

    pub fn constraint_only(constraints: Vec<AtomicConstraint>) -> Clause {
        Clause::new(constraints, vec![], vec![])
    }

    pub fn is_constraint_only(&self) -> bool {
        self.antecedent.is_empty() && self.succedent.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &FreeAtom> {
        self.antecedent.iter().chain(self.succedent.iter())
    }

    /// All terms of the clause in textual order.
    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.constraints
            .iter()
            .flat_map(|c| [&c.lhs, &c.rhs])
            .chain(self.atoms().flat_map(|a| a.terms()))
    }

    /// Distinct variables in order of first occurrence.
    pub fn vars(&self) -> Vec<Var> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for t in self.terms() {
            if let Term::Var(v) = t {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    pub fn free_part_vars(&self) -> BTreeSet<Var> {
        self.atoms().flat_map(|a| a.terms()).filter_map(|t| t.as_var().cloned()).collect()
    }

    pub fn constants(&self) -> impl Iterator<Item = &ConstSym> {
        self.terms().filter_map(|t| t.as_const())
    }

    /// Number of constant and variable occurrences.
    pub fn len(&self) -> usize {
        self.terms().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Applies a variable renaming to every occurrence.
    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> Clause {
        let mut f = |t: &Term| match t {
            Term::Var(v) => Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
            t => t.clone(),
        };
        Clause {
            id: self.id,
            constraints: self
                .constraints
                .iter()
                .map(|c| AtomicConstraint { lhs: f(&c.lhs), rel: c.rel, rhs: f(&c.rhs) })
                .collect(),
            antecedent: self.antecedent.iter().map(|a| a.map_terms(&mut f)).collect(),
            succedent: self.succedent.iter().map(|a| a.map_terms(&mut f)).collect(),
        }
    }

    /// Renames variables to `#0, #1, …` by first occurrence and clears the id;
    /// two clauses are variants of each other iff their canonical forms agree.
    pub fn canonical(&self) -> Clause {
        let map = self
            .vars()
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                let sort = v.sort;
                (v, Var { name: format!("#{}", i), sort })
            })
            .collect();
        let mut c = self.rename(&map);
        c.id = 0;
        c
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{}", x)?;
    }
    Ok(())
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.constraints.is_empty() {
            write_list(f, &self.constraints)?;
            write!(f, " ")?;
        }
        write!(f, "||")?;
        if !self.antecedent.is_empty() {
            write!(f, " ")?;
            write_list(f, &self.antecedent)?;
        }
        write!(f, " ->")?;
        if !self.succedent.is_empty() {
            write!(f, " ")?;
            write_list(f, &self.succedent)?;
        }
        write!(f, ".")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Signature {
    pub predicates: BTreeMap<String, Vec<Sort>>,
    /// Declared Skolem base constants and free constants.
    pub constants: BTreeSet<ConstSym>,
}

impl Signature {
    pub fn declare_predicate(&mut self, name: &str, sorts: Vec<Sort>) {
        self.predicates.insert(name.to_string(), sorts);
    }

    pub fn declare_constant(&mut self, c: ConstSym) {
        self.constants.insert(c);
    }

    /// The declared constant carrying this identifier.
    pub fn constant(&self, name: &str) -> Option<&ConstSym> {
        self.constants.iter().find(|c| c.name() == Some(name))
    }

    pub fn names(&self) -> BTreeSet<String> {
        self.predicates
            .keys()
            .cloned()
            .chain(self.constants.iter().filter_map(|c| c.name().map(str::to_string)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Flags {
    pub purified: bool,
    pub normal_form: bool,
    pub renamed_apart: bool,
    pub essentially_ground: bool,
}

/// A signature together with a finite sequence of clauses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseSet {
    pub signature: Signature,
    pub clauses: Vec<Clause>,
    flags: Flags,
}

impl ClauseSet {
    /// Renumbers clause ids positionally and recomputes the flags.
    pub fn new(signature: Signature, clauses: Vec<Clause>) -> ClauseSet {
        let mut set = ClauseSet { signature, clauses, flags: Flags::default() };
        set.refresh();
        set
    }

    pub fn refresh(&mut self) {
        for (i, c) in self.clauses.iter_mut().enumerate() {
            c.id = i;
        }
        self.flags = Flags {
            purified: self.clauses.iter().all(is_purified),
            normal_form: normal_form_diagnostics(self).is_empty(),
            renamed_apart: shared_variables(&self.clauses).is_empty(),
            essentially_ground: self.clauses.iter().all(is_essentially_ground),
        };
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn len(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Every constant symbol occurring in some clause.
    pub fn constants(&self) -> BTreeSet<ConstSym> {
        self.clauses.iter().flat_map(|c| c.constants().cloned()).collect()
    }

    pub fn bconsts(&self) -> BTreeSet<ConstSym> {
        self.constants().into_iter().filter(ConstSym::is_plain_base).collect()
    }

    pub fn alpha_consts(&self) -> BTreeSet<ConstSym> {
        self.constants().into_iter().filter(ConstSym::is_alpha).collect()
    }

    pub fn fconsts(&self) -> BTreeSet<ConstSym> {
        self.constants().into_iter().filter(|c| c.sort() == Sort::Free).collect()
    }

    /// Names a variable must avoid: declared symbols of the signature.
    pub fn reserved_names(&self) -> BTreeSet<String> {
        self.signature.names()
    }
}

impl fmt::Display for ClauseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{}", c)?;
        }
        Ok(())
    }
}

/// No base constant sits at a base-sort argument position.
pub fn is_purified(clause: &Clause) -> bool {
    clause.atoms().all(|a| match a {
        FreeAtom::Pred { args, .. } => {
            args.iter().all(|t| !matches!(t, Term::Const(c) if c.sort() == Sort::Base))
        }
        FreeAtom::Eq(..) => true,
    })
}

/// No free variables, and every base variable has a binding `x = d`.
pub fn is_essentially_ground(clause: &Clause) -> bool {
    clause.vars().iter().all(|v| {
        v.sort == Sort::Base
            && clause.constraints.iter().any(|c| {
                c.rel == Rel::Eq && c.lhs.as_var() == Some(v) && c.rhs.as_const().is_some()
            })
    })
}

/// Variables occurring in more than one clause.
pub fn shared_variables(clauses: &[Clause]) -> BTreeSet<Var> {
    let mut seen = BTreeSet::new();
    let mut shared = BTreeSet::new();
    for c in clauses {
        for v in c.vars() {
            if !seen.insert(v.clone()) {
                shared.insert(v);
            }
        }
    }
    shared
}

/// Violations of the normal-form conditions: base variables of `Λ` missing
/// from the free part, and variables shared between clauses.
pub fn normal_form_diagnostics(set: &ClauseSet) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for c in &set.clauses {
        let free_part = c.free_part_vars();
        let mut reported = BTreeSet::new();
        for v in c.constraints.iter().flat_map(|k| k.vars()) {
            if v.sort == Sort::Base && !free_part.contains(v) && reported.insert(v.clone()) {
                out.push(Diagnostic::at(
                    c.id,
                    format!("variable {} occurs in the constraint part only", v),
                ));
            }
        }
    }
    for v in shared_variables(&set.clauses) {
        out.push(Diagnostic::global(format!("variable {} is shared between clauses", v)));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub clause: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    pub fn at(clause: usize, message: impl Into<String>) -> Diagnostic {
        Diagnostic { clause: Some(clause), message: message.into() }
    }

    pub fn global(message: impl Into<String>) -> Diagnostic {
        Diagnostic { clause: None, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.clause {
            Some(i) => write!(f, "clause {}: {}", i, self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

pub const MSG_PURIFY: &str = "base constant at predicate argument; purification required";
pub const MSG_NON_SIMPLE: &str = "non-simple bound";

fn check_constraint(c: &AtomicConstraint, id: usize, out: &mut Vec<Diagnostic>) {
    for t in [&c.lhs, &c.rhs] {
        if t.sort() != Sort::Base {
            out.push(Diagnostic::at(id, format!("free-sort term {} in constraint {}", t, c)));
            return;
        }
    }
    let shape_ok = match (&c.lhs, &c.rhs) {
        (Term::Var(_), Term::Var(_)) => {
            out.push(Diagnostic::at(id, format!("{}: {}", MSG_NON_SIMPLE, c)));
            return;
        }
        (Term::Const(_), Term::Var(_)) => {
            out.push(Diagnostic::at(id, format!("variable on right-hand side: {}", c)));
            return;
        }
        (Term::Var(_), Term::Const(d)) => !d.is_alpha() || c.rel == Rel::Eq,
        (Term::Const(l), Term::Const(r)) => l.is_alpha() || !r.is_alpha(),
    };
    if !shape_ok {
        out.push(Diagnostic::at(id, format!("inadmissible constraint shape: {}", c)));
    }
}

fn check_const(c: &ConstSym, sig: &Signature, id: usize, out: &mut Vec<Diagnostic>) {
    match c {
        ConstSym::AlphaEps(inner) => {
            if !inner.is_plain_base() {
                out.push(Diagnostic::at(id, format!("{} wraps a non-base or alpha constant", c)));
            } else {
                check_const(inner, sig, id, out);
            }
        }
        ConstSym::Skolem(_) | ConstSym::Free(_) if !sig.constants.contains(c) => {
            out.push(Diagnostic::at(id, format!("undeclared constant {}", c)));
        }
        _ => {}
    }
}

/// Reports every violation of the clause grammar, of the sorting discipline,
/// and of signature consistency. An empty result means the set is legal.
pub fn wellformed(set: &ClauseSet) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let sig = &set.signature;
    let mut names: BTreeMap<&str, &'static str> = BTreeMap::new();
    for p in sig.predicates.keys() {
        names.insert(p, "predicate");
    }
    for c in &sig.constants {
        match c {
            ConstSym::Skolem(n) | ConstSym::Free(n) => {
                if names.insert(n, "constant").is_some() {
                    out.push(Diagnostic::global(format!("symbol {} declared twice", n)));
                }
            }
            other => out.push(Diagnostic::global(format!("{} cannot be declared", other))),
        }
    }
    for clause in &set.clauses {
        let id = clause.id;
        let mut sorts: BTreeMap<&str, Sort> = BTreeMap::new();
        for t in clause.terms() {
            match t {
                Term::Var(v) => {
                    if let Some(s) = sorts.insert(&v.name, v.sort) {
                        if s != v.sort {
                            out.push(Diagnostic::at(id, format!("variable {} used at both sorts", v)));
                        }
                    }
                    if sig.constant(&v.name).is_some() {
                        out.push(Diagnostic::at(id, format!("variable {} shadows a constant", v)));
                    }
                }
                Term::Const(c) => check_const(c, sig, id, &mut out),
            }
        }
        for c in &clause.constraints {
            check_constraint(c, id, &mut out);
        }
        for a in clause.atoms() {
            match a {
                FreeAtom::Eq(l, r) => {
                    for t in [l, r] {
                        if t.sort() != Sort::Free {
                            out.push(Diagnostic::at(id, format!("base-sort term {} in equation {}", t, a)));
                        }
                    }
                }
                FreeAtom::Pred { symbol, args } => {
                    let Some(sorts) = sig.predicates.get(symbol) else {
                        out.push(Diagnostic::at(id, format!("undeclared predicate {}", symbol)));
                        continue;
                    };
                    if sorts.len() != args.len() {
                        out.push(Diagnostic::at(
                            id,
                            format!("{} expects {} arguments, got {}", symbol, sorts.len(), args.len()),
                        ));
                        continue;
                    }
                    for (t, s) in args.iter().zip(sorts) {
                        if t.sort() != *s {
                            out.push(Diagnostic::at(id, format!("argument {} of {} has the wrong sort", t, a)));
                        } else if *s == Sort::Base && t.as_const().is_some() {
                            out.push(Diagnostic::at(id, format!("{}: {} in {}", MSG_PURIFY, t, a)));
                        }
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Stats {
    /// Occurrences of constants and variables.
    pub len: usize,
    pub bconsts: BTreeSet<ConstSym>,
    pub alpha_consts: BTreeSet<ConstSym>,
    pub fconsts: BTreeSet<ConstSym>,
    pub vars: BTreeSet<Var>,
}

pub fn stats(set: &ClauseSet) -> Stats {
    Stats {
        len: set.len(),
        bconsts: set.bconsts(),
        alpha_consts: set.alpha_consts(),
        fconsts: set.fconsts(),
        vars: set.clauses.iter().flat_map(Clause::vars).collect(),
    }
}

/// Ground constraints evaluated by syntax alone: `Some(false)` if some
/// constraint is decidably false, otherwise the constraints that survive
/// after dropping the decidably true ones.
pub fn simplify_constraints(constraints: &[AtomicConstraint]) -> Option<Vec<AtomicConstraint>> {
    let mut kept = Vec::with_capacity(constraints.len());
    for c in constraints {
        match c.eval_syntactic() {
            Some(true) => {}
            Some(false) => return None,
            None => kept.push(c.clone()),
        }
    }
    Some(kept)
}

/// Drops decidably true constraints and removes clauses with a decidably
/// false one.
pub fn simplify_clauses(clauses: Vec<Clause>) -> Vec<Clause> {
    clauses
        .into_iter()
        .filter_map(|c| {
            simplify_constraints(&c.constraints).map(|constraints| Clause { constraints, ..c })
        })
        .collect()
}

/// Removes clauses that are variants of an earlier clause.
pub fn dedup_variants(clauses: Vec<Clause>) -> Vec<Clause> {
    let mut seen = BTreeSet::new();
    clauses.into_iter().filter(|c| seen.insert(c.canonical())).collect()
}

/// Renames variables so clauses are pairwise disjoint. A variable keeps its
/// name unless an earlier clause already used it.
pub fn rename_apart(clauses: Vec<Clause>, reserved: &BTreeSet<String>) -> Vec<Clause> {
    let mut used: BTreeSet<String> = BTreeSet::new();
    let all_names: BTreeSet<String> =
        clauses.iter().flat_map(|c| c.vars().into_iter().map(|v| v.name)).collect();
    let mut out = Vec::with_capacity(clauses.len());
    for c in clauses {
        let mut map = BTreeMap::new();
        for v in c.vars() {
            let name = if !used.contains(&v.name) && !reserved.contains(&v.name) {
                v.name.clone()
            } else {
                (1..)
                    .map(|k| format!("{}_{}", v.name, k))
                    .find(|n| !used.contains(n) && !reserved.contains(n) && !all_names.contains(n))
                    .expect("unbounded name supply")
            };
            used.insert(name.clone());
            if name != v.name {
                map.insert(v.clone(), Var { name, sort: v.sort });
            }
        }
        out.push(if map.is_empty() { c } else { c.rename(&map) });
    }
    out
}

/// Whether a rational is an integer.
pub fn is_integer(q: &Rational) -> bool {
    q.is_integer()
}


#[cfg(test)]
mod tests {
    use super::*;

    fn sig_intro() -> Signature {
        let mut s = Signature::default();
        s.declare_predicate("Q", vec![Sort::Free, Sort::Base]);
        s.declare_predicate("R", vec![Sort::Base]);
        s.declare_constant(ConstSym::free("c"));
        s
    }

    fn intro_c1() -> Clause {
        Clause::new(
            vec![AtomicConstraint::new(Var::base("x2"), Rel::Ne, ConstSym::int(5))],
            vec![FreeAtom::pred("R", vec![Var::base("x1").into()])],
            vec![FreeAtom::pred("Q", vec![Var::free("u1").into(), Var::base("x2").into()])],
        )
    }

    #[test]
    fn intro_clause_is_wellformed() {
        let set = ClauseSet::new(sig_intro(), vec![intro_c1()]);
        assert_eq!(wellformed(&set), vec![]);
        assert_eq!(intro_c1().to_string(), "x2 != 5 || R(x1) -> Q(u1, x2).");
    }

    #[test]
    fn constant_at_base_position_needs_purification() {
        let mut sig = Signature::default();
        sig.declare_predicate("P", vec![Sort::Base]);
        let c = Clause::new(vec![], vec![], vec![FreeAtom::pred("P", vec![ConstSym::int(5).into()])]);
        let d = wellformed(&ClauseSet::new(sig, vec![c]));
        assert_eq!(d.len(), 1);
        assert!(d[0].message.starts_with(MSG_PURIFY));
    }

    #[test]
    fn two_variable_constraint_is_not_simple() {
        let mut sig = Signature::default();
        sig.declare_predicate("P", vec![Sort::Base, Sort::Base]);
        let c = Clause::new(
            vec![AtomicConstraint::new(Var::base("x"), Rel::Lt, Var::base("y"))],
            vec![],
            vec![FreeAtom::pred("P", vec![Var::base("x").into(), Var::base("y").into()])],
        );
        let d = wellformed(&ClauseSet::new(sig, vec![c]));
        assert_eq!(d.len(), 1);
        assert!(d[0].message.starts_with(MSG_NON_SIMPLE));
    }

    #[test]
    fn alpha_shapes() {
        let eps5 = ConstSym::eps(ConstSym::int(5));
        let ok = [
            AtomicConstraint::new(Var::base("x"), Rel::Eq, eps5.clone()),
            AtomicConstraint::new(eps5.clone(), Rel::Le, ConstSym::int(5)),
            AtomicConstraint::new(eps5.clone(), Rel::Ne, ConstSym::AlphaMinf),
        ];
        for c in ok {
            let mut d = vec![];
            check_constraint(&c, 0, &mut d);
            assert!(d.is_empty(), "{}", c);
        }
        let mut d = vec![];
        check_constraint(&AtomicConstraint::new(Var::base("x"), Rel::Lt, eps5.clone()), 0, &mut d);
        check_constraint(&AtomicConstraint::new(ConstSym::int(5), Rel::Lt, eps5), 0, &mut d);
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn wellformed_is_pure() {
        let mut sig = sig_intro();
        sig.declare_predicate("P", vec![Sort::Base]);
        let c = Clause::new(
            vec![AtomicConstraint::new(Var::base("x"), Rel::Lt, Var::base("y"))],
            vec![],
            vec![FreeAtom::pred("P", vec![ConstSym::int(1).into()])],
        );
        let set = ClauseSet::new(sig, vec![c, intro_c1()]);
        assert_eq!(wellformed(&set), wellformed(&set));
    }

    #[test]
    fn orientation_puts_alpha_and_vars_left() {
        let eps = ConstSym::eps(ConstSym::int(5));
        let c = AtomicConstraint::new(ConstSym::int(5), Rel::Ge, eps.clone()).oriented();
        assert_eq!(c, AtomicConstraint::new(eps, Rel::Le, ConstSym::int(5)));
        let c = AtomicConstraint::new(ConstSym::int(2), Rel::Lt, Var::base("x")).oriented();
        assert_eq!(c.to_string(), "x > 2");
    }

    #[test]
    fn syntactic_evaluation() {
        let a = ConstSym::skolem("a");
        assert_eq!(AtomicConstraint::new(ConstSym::int(4), Rel::Lt, ConstSym::int(7)).eval_syntactic(), Some(true));
        assert_eq!(AtomicConstraint::new(a.clone(), Rel::Lt, a.clone()).eval_syntactic(), Some(false));
        assert_eq!(AtomicConstraint::new(a, Rel::Lt, ConstSym::int(1)).eval_syntactic(), None);
    }

    #[test]
    fn rename_apart_keeps_first_names() {
        let c = intro_c1();
        let out = rename_apart(vec![c.clone(), c.clone()], &BTreeSet::new());
        assert_eq!(out[0], c);
        assert_eq!(out[1].to_string(), "x2_1 != 5 || R(x1_1) -> Q(u1_1, x2_1).");
        assert!(shared_variables(&out).is_empty());
    }

    #[test]
    fn flags_track_content() {
        let set = ClauseSet::new(sig_intro(), vec![intro_c1()]);
        let f = set.flags();
        assert!(f.purified && f.normal_form && f.renamed_apart && !f.essentially_ground);
        let c = Clause::new(vec![AtomicConstraint::new(Var::base("x"), Rel::Lt, ConstSym::int(7))], vec![], vec![]);
        assert!(!ClauseSet::new(sig_intro(), vec![c]).flags().normal_form);
    }

    #[test]
    fn empty_stats() {
        let s = stats(&ClauseSet::new(Signature::default(), vec![]));
        assert_eq!(s, Stats::default());
    }
}
