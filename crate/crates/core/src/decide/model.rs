use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::FreeCongruence;
use crate::frontend::parse_const_sym;
use crate::ground::bindings;
use crate::syntax::{Clause, ClauseSet, ConstSym, FreeAtom, Rational, Sort, Term};

/// An element of the domain: a real for the base sort, a congruence class
/// (named by its representative) for the free sort.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ModelValue {
    Real(Rational),
    Class(ConstSym),
}

impl fmt::Display for ModelValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelValue::Real(q) => write!(f, "{}", q),
            ModelValue::Class(c) => write!(f, "{}", c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HierarchicModel {
    /// Values of the non-numeric base constants; numerals denote themselves.
    pub base_values: BTreeMap<ConstSym, Rational>,
    pub congruence: FreeCongruence,
    pub extensions: BTreeMap<String, BTreeSet<Vec<ModelValue>>>,
}

impl fmt::Display for HierarchicModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, v) in &self.base_values {
            writeln!(f, "base {} = {}", c, v)?;
        }
        write!(f, "{}", self.congruence)?;
        for (p, tuples) in &self.extensions {
            let items: Vec<String> = tuples
                .iter()
                .map(|t| format!("({})", t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")))
                .collect();
            writeln!(f, "pred {} = {{{}}}", p, items.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("the model does not interpret `{0}`")]
    MissingSymbol(String),
    #[error("clause `{0}` is not essentially ground")]
    NotGround(String),
    #[error("malformed model document: {0}")]
    Document(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyOutcome {
    Satisfied,
    Violated { clause: Clause },
}

impl VerifyOutcome {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, VerifyOutcome::Satisfied)
    }
}

impl HierarchicModel {
    pub fn value_of(&self, c: &ConstSym) -> Result<ModelValue, ModelError> {
        let missing = || ModelError::MissingSymbol(c.to_string());
        match c {
            ConstSym::Numeric(q) => Ok(ModelValue::Real(q.clone())),
            c if c.sort() == Sort::Base => self.base_values.get(c).cloned().map(ModelValue::Real).ok_or_else(missing),
            c => self.congruence.rep_of(c).cloned().map(ModelValue::Class).ok_or_else(missing),
        }
    }

    fn holds(&self, atom: &FreeAtom, value: &dyn Fn(&Term) -> Result<ModelValue, ModelError>) -> Result<bool, ModelError> {
        match atom {
            FreeAtom::Eq(l, r) => Ok(value(l)? == value(r)?),
            FreeAtom::Pred { symbol, args } => {
                let ext = self.extensions.get(symbol).ok_or_else(|| ModelError::MissingSymbol(symbol.clone()))?;
                let tuple = args.iter().map(value).collect::<Result<Vec<_>, _>>()?;
                Ok(ext.contains(&tuple))
            }
        }
    }

    fn satisfies(&self, clause: &Clause) -> Result<bool, ModelError> {
        let b = bindings(clause);
        let value = |t: &Term| -> Result<ModelValue, ModelError> {
            match t {
                Term::Const(c) => self.value_of(c),
                Term::Var(v) => match b.get(v) {
                    Some(d) => self.value_of(d),
                    None => Err(ModelError::NotGround(clause.to_string())),
                },
            }
        };
        for k in &clause.constraints {
            let (ModelValue::Real(l), ModelValue::Real(r)) = (value(&k.lhs)?, value(&k.rhs)?) else {
                return Err(ModelError::NotGround(clause.to_string()));
            };
            if !k.rel.holds(l.cmp(&r)) {
                return Ok(true);
            }
        }
        for a in &clause.antecedent {
            if !self.holds(a, &value)? {
                return Ok(true);
            }
        }
        for a in &clause.succedent {
            if self.holds(a, &value)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Evaluates every clause of an essentially ground set under `model`, with
/// each base variable read from its binding. Reports the first clause that
/// is false.
pub fn verify_model(set: &ClauseSet, model: &HierarchicModel) -> Result<VerifyOutcome, ModelError> {
    for c in &set.clauses {
        if !model.satisfies(c)? {
            return Ok(VerifyOutcome::Violated { clause: c.clone() });
        }
    }
    Ok(VerifyOutcome::Satisfied)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueDoc {
    Real(String),
    Class(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDoc {
    pub members: Vec<String>,
    pub rep: String,
}

/// Serializable form of a [`HierarchicModel`]; rationals are written as
/// strings such as `"-1/3"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub base: BTreeMap<String, String>,
    pub classes: Vec<ClassDoc>,
    pub predicates: BTreeMap<String, Vec<Vec<ValueDoc>>>,
}

impl ModelDocument {
    pub fn from_model(m: &HierarchicModel) -> ModelDocument {
        let base = m.base_values.iter().map(|(c, v)| (c.to_string(), v.to_string())).collect();
        let classes = m
            .congruence
            .classes()
            .into_iter()
            .map(|(rep, members)| ClassDoc { members: members.iter().map(|c| c.to_string()).collect(), rep: rep.to_string() })
            .collect();
        let predicates = m
            .extensions
            .iter()
            .map(|(p, tuples)| {
                let rows = tuples
                    .iter()
                    .map(|t| {
                        t.iter()
                            .map(|v| match v {
                                ModelValue::Real(q) => ValueDoc::Real(q.to_string()),
                                ModelValue::Class(c) => ValueDoc::Class(c.to_string()),
                            })
                            .collect()
                    })
                    .collect();
                (p.clone(), rows)
            })
            .collect();
        ModelDocument { base, classes, predicates }
    }

    /// Rebuilds the model, resolving constant names through `set`.
    pub fn to_model(&self, set: &ClauseSet) -> Result<HierarchicModel, ModelError> {
        let sym = |s: &str| parse_const_sym(s, set).ok_or_else(|| ModelError::Document(format!("unknown constant `{}`", s)));
        let real = |s: &str| Rational::from_str(s).map_err(|_| ModelError::Document(format!("bad rational `{}`", s)));
        let mut base_values = BTreeMap::new();
        for (c, v) in &self.base {
            base_values.insert(sym(c)?, real(v)?);
        }
        let mut classes = Vec::new();
        for class in &self.classes {
            let members = class.members.iter().map(|m| sym(m)).collect::<Result<BTreeSet<_>, _>>()?;
            if members.first() != Some(&sym(&class.rep)?) {
                return Err(ModelError::Document(format!("`{}` is not the least member of its class", class.rep)));
            }
            classes.push(members);
        }
        let mut extensions = BTreeMap::new();
        for (p, rows) in &self.predicates {
            let mut tuples = BTreeSet::new();
            for row in rows {
                let tuple = row
                    .iter()
                    .map(|v| match v {
                        ValueDoc::Real(q) => real(q).map(ModelValue::Real),
                        ValueDoc::Class(c) => sym(c).map(ModelValue::Class),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                tuples.insert(tuple);
            }
            extensions.insert(p.clone(), tuples);
        }
        Ok(HierarchicModel { base_values, congruence: FreeCongruence::from_classes(classes), extensions })
    }
}
