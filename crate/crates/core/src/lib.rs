//! Decision procedure for Bernays-Schönfinkel-Ramsey clause sets with simple
//! bounds over the reals.
//!
//! The pipeline is [`frontend::parse`] → [`frontend::purify`] →
//! [`normalize::normalize`] → [`analysis`] → [`ground::ground_all`] →
//! [`decide::decide_ground`]; [`decide::solve`] runs all of it and checks the
//! resulting model before returning it.

pub mod analysis;
pub mod decide;
pub mod frontend;
pub mod ground;
pub mod normalize;
pub mod syntax;
pub mod tcm;
pub mod testgen;
mod unionfind;

pub use analysis::{alpha_axioms, ap_classes, inst_points, ApClassPartition, InstPointSet, Position};
pub use decide::{
    decide_ground, oracle_solve, realize_arrangement, solve, solve_text, verify_model, Arrangement,
    Decision, DecideOptions, FreeCongruence, HierarchicModel, ModelValue, Solution,
};
pub use frontend::{check_fragment, parse, print, purify, FragmentClass};
pub use ground::{apply_subst, ground_all, Grounding};
pub use normalize::{fm_eliminate, is_normal_form, normalize};
pub use syntax::{
    stats, wellformed, AtomicConstraint, Clause, ClauseSet, ConstSym, Diagnostic, FreeAtom, Rational,
    Rel, Signature, Sort, Stats, Term, Var,
};
pub use tcm::{EncodingStyle, TwoCounterMachine};
