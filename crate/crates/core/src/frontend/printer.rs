use std::fmt::Write;

use crate::syntax::{ClauseSet, ConstSym, Signature, Sort};

/// Declarations in canonical order: predicates, then constants.
pub fn print_signature(sig: &Signature) -> String {
    let mut out = String::new();
    for (p, sorts) in &sig.predicates {
        let _ = write!(out, "pred {} :", p);
        for s in sorts {
            let _ = write!(out, " {}", s);
        }
        out.push_str(".\n");
    }
    for c in &sig.constants {
        if let ConstSym::Skolem(n) | ConstSym::Free(n) = c {
            let sort = if c.sort() == Sort::Base { "R" } else { "S" };
            let _ = writeln!(out, "const {} : {}.", n, sort);
        }
    }
    out
}

/// Canonical problem text; parsing it yields the same clause set.
pub fn print(set: &ClauseSet) -> String {
    let mut out = print_signature(&set.signature);
    for c in &set.clauses {
        let _ = writeln!(out, "{}", c);
    }
    out
}
