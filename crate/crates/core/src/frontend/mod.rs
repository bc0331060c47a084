//! Problem text: parsing, printing, basification, purification and fragment
//! classification.

mod basify;
mod fragment;
mod lexer;
mod parser;
mod printer;
mod purify;
pub mod raw;

use std::fmt;

use thiserror::Error;

pub use basify::basify;
pub use fragment::{check_fragment, FragmentClass};
pub use parser::parse_raw;
pub use printer::{print, print_signature};
pub use purify::purify;

use crate::analysis::axiom_closure;
use crate::syntax::{ClauseSet, ConstSym, FreeAtom, Sort, Term};
use lexer::{tokenize, Tok};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    /// A variable used at both a base and a free position.
    SortConflict(String),
    Arity { predicate: String, expected: usize, found: usize },
    Redeclared(String),
    UndeclaredPredicate(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => f.write_str(m),
            ParseErrorKind::SortConflict(v) => write!(f, "variable `{}` used at both sorts", v),
            ParseErrorKind::Arity { predicate, expected, found } => {
                write!(f, "`{}` expects {} arguments, found {}", predicate, expected, found)
            }
            ParseErrorKind::Redeclared(n) => write!(f, "`{}` declared twice", n),
            ParseErrorKind::UndeclaredPredicate(p) => write!(f, "undeclared predicate `{}`", p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(line: usize, col: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line, col, kind }
    }

    pub(crate) fn syntax(line: usize, col: usize, message: String) -> ParseError {
        ParseError::new(line, col, ParseErrorKind::Syntax(message))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BasifyErrorKind {
    #[error("more than one variable in `{0}`")]
    MultipleVariables(String),
    #[error("nonlinear occurrence of a variable in `{0}`")]
    Nonlinear(String),
    #[error("division by zero in `{0}`")]
    DivisionByZero(String),
    #[error("base constant `{0}` inside arithmetic is not supported")]
    SkolemInArithmetic(String),
    #[error("`{0}` cannot be evaluated to a number")]
    NonNumeric(String),
    #[error("function `{0}` inside a base-sort term")]
    FunctionInArithmetic(String),
    #[error("function term `{0}` is not ground")]
    NonGroundFunction(String),
    #[error("base argument `{0}` is neither a variable nor ground")]
    NonGroundArgument(String),
    #[error("`{0}` is not a base constant")]
    NonGround(String),
    #[error("`{0}` has the wrong sort")]
    SortMismatch(String),
    #[error("`{0}` must wrap a numeral or base constant")]
    NestedAlpha(String),
    #[error("a variable may only be equated with an alpha constant: `{0}`")]
    AlphaBound(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct BasifyError {
    pub line: usize,
    pub kind: BasifyErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("syntax error at {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Basify(#[from] BasifyError),
}

/// Parses problem text into a purified clause set, adding the axioms for
/// any alpha constants it mentions and a free constant if there is none.
pub fn parse(text: &str) -> Result<ClauseSet, FrontendError> {
    let raw = parse_raw(text)?;
    Ok(complete(basify(&raw)?))
}

/// Adds the alpha axioms not yet present and, when no free constant occurs,
/// a fresh one together with the tautology `|| -> d ~ d.`.
pub fn complete(mut set: ClauseSet) -> ClauseSet {
    let alpha = set.alpha_consts();
    if !alpha.is_empty() {
        let present: std::collections::BTreeSet<_> = set.clauses.iter().map(|c| c.canonical()).collect();
        for ax in axiom_closure(&alpha, &set.bconsts()) {
            if !present.contains(&ax.canonical()) {
                set.clauses.push(ax);
            }
        }
    }
    if set.fconsts().is_empty() {
        let declared = set.signature.constants.iter().find(|c| c.sort() == Sort::Free).cloned();
        let d = declared.unwrap_or_else(|| {
            let names = set.reserved_names();
            let name = (0..).map(|k| format!("_d{}", k)).find(|n| !names.contains(n)).expect("fresh name");
            ConstSym::Free(name)
        });
        set.signature.declare_constant(d.clone());
        let taut = crate::syntax::Clause::new(vec![], vec![], vec![FreeAtom::Eq(Term::Const(d.clone()), Term::Const(d))]);
        set.clauses.push(taut);
    }
    set.refresh();
    set
}

/// Reads a constant symbol as printed, resolving names through `set`.
pub fn parse_const_sym(text: &str, set: &ClauseSet) -> Option<ConstSym> {
    let toks: Vec<Tok> = tokenize(text).ok()?.into_iter().map(|t| t.tok).collect();
    let numeral = |toks: &[Tok]| match toks {
        [Tok::Num(q)] => Some(ConstSym::Numeric(q.clone())),
        [Tok::Minus, Tok::Num(q)] => Some(ConstSym::Numeric(-q.clone())),
        [Tok::Ident(n)] => set.signature.constant(n).cloned(),
        _ => None,
    };
    match toks.as_slice() {
        [Tok::Minf, Tok::Eof] => Some(ConstSym::AlphaMinf),
        [Tok::Eps, Tok::LParen, inner @ .., Tok::RParen, Tok::Eof] => {
            numeral(inner).filter(ConstSym::is_plain_base).map(ConstSym::eps)
        }
        [rest @ .., Tok::Eof] => numeral(rest),
        _ => None,
    }
}

#[cfg(test)]
pub(crate) mod tests_support {
    pub const INTRO: &str = "pred Q : S R.\npred R : R.\nconst c : S.\n\
        x2 != 5 || R(x1) -> Q(u1, x2).\ny1 < 7, y2 <= 2 || -> Q(c, y2), R(y1).\n";
    pub const EXAMPLE_3_6: &str = "pred Q : R R.\npred T : R.\nx > 2, z = 4 || Q(x, z) -> T(x).\n";
}

#[cfg(test)]
mod tests {
    use super::tests_support::INTRO;
    use super::*;
    use crate::syntax::{ratio, stats, wellformed};

    #[test]
    fn intro_parses() {
        let s = parse(INTRO).unwrap();
        assert_eq!(s.clauses.len(), 2);
        assert_eq!(s.clauses[0].to_string(), "x2 != 5 || R(x1) -> Q(u1, x2).");
        assert_eq!(s.signature.predicates["Q"], vec![Sort::Free, Sort::Base]);
        assert!(s.signature.constants.contains(&ConstSym::free("c")));
        let st = stats(&s);
        assert_eq!(st.bconsts, [5, 7, 2].map(ConstSym::int).into());
        assert_eq!(st.fconsts, [ConstSym::free("c")].into());
        assert!(st.alpha_consts.is_empty());
    }

    #[test]
    fn example_3_6_stats() {
        let s = parse("pred Q : R R.\npred T : R.\nx > 2, z = 4 || Q(x, z) -> T(x).").unwrap();
        let st = stats(&s);
        assert_eq!(st.bconsts, [2, 4].map(ConstSym::int).into());
        // the free constant and its tautology come on top of the 7 occurrences
        assert_eq!(s.clauses[0].len(), 7);
        assert_eq!(st.len, 9);
    }

    #[test]
    fn round_trip() {
        for text in [
            INTRO,
            "pred P : R.\nx = @eps(5) || -> P(x).\n",
            "pred P : S R.\nconst a : R.\nx < a, x >= -1/3 || P(g(2), x) -> P(g(3), x).\n",
            "pred P : .\n|| P ->.\n",
        ] {
            let s = parse(text).unwrap();
            let printed = print(&s);
            let again = parse(&printed).unwrap();
            assert_eq!(again, s, "{}", printed);
            assert_eq!(print(&again), printed);
            assert_eq!(wellformed(&s), vec![]);
        }
    }

    #[test]
    fn alpha_axioms_are_appended() {
        let s = parse("pred P : R.\nx = @eps(5), x > 2 || -> P(x).").unwrap();
        let texts: Vec<String> = s.clauses.iter().map(|c| c.to_string()).collect();
        assert_eq!(&texts[1..], ["@eps(5) <= 5 || ->.", "|| -> _d0 ~ _d0."]);
        for c in s.alpha_consts() {
            if let ConstSym::AlphaEps(d) = c {
                assert!(s.bconsts().contains(&d));
            }
        }
    }

    #[test]
    fn free_constant_added_when_missing() {
        let s = parse("pred P : R.\nx < 3 || -> P(x).").unwrap();
        assert_eq!(s.clauses.last().unwrap().to_string(), "|| -> _d0 ~ _d0.");
        assert_eq!(print(&s).lines().nth(1), Some("const _d0 : S."));
    }

    #[test]
    fn empty_problem_prints_declarations() {
        let s = parse("pred P : R.\nconst c : S.\n").unwrap();
        assert_eq!(print(&s), "pred P : R.\nconst c : S.\n|| -> c ~ c.\n");
    }

    #[test]
    fn const_sym_parsing() {
        let s = parse("pred P : R.\nconst a : R.\nconst c : S.\n|| -> P(a).").unwrap();
        assert_eq!(parse_const_sym("-1/3", &s), Some(ConstSym::Numeric(ratio(-1, 3))));
        assert_eq!(parse_const_sym("@eps(a)", &s), Some(ConstSym::eps(ConstSym::skolem("a"))));
        assert_eq!(parse_const_sym("@minf", &s), Some(ConstSym::AlphaMinf));
        assert_eq!(parse_const_sym("c", &s), Some(ConstSym::free("c")));
        assert_eq!(parse_const_sym("zz", &s), None);
    }
}
