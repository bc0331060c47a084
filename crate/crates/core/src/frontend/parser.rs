use std::collections::BTreeMap;

use super::lexer::{tokenize, Spanned, Tok};
use super::raw::{Op, RawAtom, RawClause, RawConstraint, RawProblem, RawTerm};
use super::{ParseError, ParseErrorKind};
use crate::syntax::Sort;

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

struct Decl {
    name: String,
    line: usize,
    col: usize,
    kind: DeclKind,
}

enum DeclKind {
    Pred(Vec<Sort>),
    Const(Sort),
}

struct AtomAt {
    atom: RawAtom,
    line: usize,
    col: usize,
}

struct ClauseAt {
    line: usize,
    col: usize,
    constraints: Vec<RawConstraint>,
    antecedent: Vec<AtomAt>,
    succedent: Vec<AtomAt>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let (line, col) = self.here();
        ParseError::syntax(line, col, format!("expected {}, found {}", expected, self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn is_decl(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
            && matches!(self.peek_at(1), Tok::Ident(_))
            && *self.peek_at(2) == Tok::Colon
    }

    fn sort(&mut self) -> Result<Sort, ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == "R" => {
                self.bump();
                Ok(Sort::Base)
            }
            Tok::Ident(s) if s == "S" => {
                self.bump();
                Ok(Sort::Free)
            }
            _ => Err(self.error("sort `R` or `S`")),
        }
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        let is_pred = matches!(self.bump(), Tok::Ident(s) if s == "pred");
        let (line, col) = self.here();
        let Tok::Ident(name) = self.bump() else { unreachable!("checked by is_decl") };
        self.bump();
        let kind = if is_pred {
            let mut sorts = Vec::new();
            while *self.peek() != Tok::Dot {
                sorts.push(self.sort()?);
            }
            DeclKind::Pred(sorts)
        } else {
            DeclKind::Const(self.sort()?)
        };
        self.expect(Tok::Dot, "`.`")?;
        Ok(Decl { name, line, col, kind })
    }

    fn clause(&mut self) -> Result<ClauseAt, ParseError> {
        let (line, col) = self.here();
        let mut constraints = Vec::new();
        if *self.peek() != Tok::Bars {
            loop {
                let lhs = self.term()?;
                let Tok::Rel(rel) = *self.peek() else {
                    return Err(self.error("a comparison"));
                };
                self.bump();
                let rhs = self.term()?;
                constraints.push(RawConstraint { lhs, rel, rhs });
                if *self.peek() != Tok::Comma {
                    break;
                }
                self.bump();
            }
        }
        self.expect(Tok::Bars, "`||`")?;
        let antecedent = self.atoms(Tok::Arrow)?;
        self.expect(Tok::Arrow, "`->`")?;
        let succedent = self.atoms(Tok::Dot)?;
        self.expect(Tok::Dot, "`.`")?;
        Ok(ClauseAt { line, col, constraints, antecedent, succedent })
    }

    fn atoms(&mut self, end: Tok) -> Result<Vec<AtomAt>, ParseError> {
        let mut out = Vec::new();
        if *self.peek() == end {
            return Ok(out);
        }
        loop {
            let (line, col) = self.here();
            let t = self.term()?;
            let atom = if *self.peek() == Tok::Tilde {
                self.bump();
                RawAtom::Eq(t, self.term()?)
            } else {
                match t {
                    RawTerm::Sym(symbol) => RawAtom::Pred { symbol, args: vec![] },
                    RawTerm::App(Op::Fun(symbol), args) => RawAtom::Pred { symbol, args },
                    _ => return Err(ParseError::syntax(line, col, "expected an atom".into())),
                }
            };
            out.push(AtomAt { atom, line, col });
            if *self.peek() != Tok::Comma {
                return Ok(out);
            }
            self.bump();
        }
    }

    fn term(&mut self) -> Result<RawTerm, ParseError> {
        let mut t = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => Op::Add,
                Tok::Minus => Op::Sub,
                _ => return Ok(t),
            };
            self.bump();
            t = RawTerm::app(op, vec![t, self.product()?]);
        }
    }

    fn product(&mut self) -> Result<RawTerm, ParseError> {
        let mut t = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => Op::Mul,
                Tok::Slash => Op::Div,
                _ => return Ok(t),
            };
            self.bump();
            t = RawTerm::app(op, vec![t, self.unary()?]);
        }
    }

    fn unary(&mut self) -> Result<RawTerm, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(match self.unary()? {
                RawTerm::Num(q) => RawTerm::Num(-q),
                t => RawTerm::app(Op::Neg, vec![t]),
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<RawTerm, ParseError> {
        match self.peek().clone() {
            Tok::Num(q) => {
                self.bump();
                Ok(RawTerm::Num(q))
            }
            Tok::Minf => {
                self.bump();
                Ok(RawTerm::Minf)
            }
            Tok::Eps => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(RawTerm::Eps(Box::new(t)))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() != Tok::LParen {
                    return Ok(RawTerm::Sym(name));
                }
                self.bump();
                let mut args = Vec::new();
                if *self.peek() != Tok::RParen {
                    loop {
                        args.push(self.term()?);
                        if *self.peek() != Tok::Comma {
                            break;
                        }
                        self.bump();
                    }
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(RawTerm::App(Op::Fun(name), args))
            }
            _ => Err(self.error("a term")),
        }
    }
}

/// Parses and sort-checks a problem without flattening its terms.
pub fn parse_raw(text: &str) -> Result<RawProblem, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    let mut decls = Vec::new();
    let mut clauses = Vec::new();
    while *p.peek() != Tok::Eof {
        if p.is_decl("pred") || p.is_decl("const") {
            decls.push(p.decl()?);
        } else {
            clauses.push(p.clause()?);
        }
    }
    let mut problem = RawProblem::default();
    for d in decls {
        if problem.predicates.contains_key(&d.name) || problem.constants.contains_key(&d.name) {
            return Err(ParseError::new(d.line, d.col, ParseErrorKind::Redeclared(d.name)));
        }
        match d.kind {
            DeclKind::Pred(sorts) => {
                problem.predicates.insert(d.name, sorts);
            }
            DeclKind::Const(s) => {
                problem.constants.insert(d.name, s);
            }
        }
    }
    for c in clauses {
        let clause = resolve(&problem, c)?;
        problem.clauses.push(clause);
    }
    Ok(problem)
}

struct SortInference<'a> {
    problem: &'a RawProblem,
    sorts: BTreeMap<String, Sort>,
    line: usize,
    col: usize,
}

impl SortInference<'_> {
    fn assign(&mut self, name: &str, sort: Sort) -> Result<(), ParseError> {
        if self.problem.predicates.contains_key(name) {
            return Err(ParseError::new(
                self.line,
                self.col,
                ParseErrorKind::Syntax(format!("predicate `{}` used as a term", name)),
            ));
        }
        if self.problem.constants.contains_key(name) {
            return Ok(());
        }
        match self.sorts.insert(name.to_string(), sort) {
            Some(s) if s != sort => Err(ParseError::new(
                self.line,
                self.col,
                ParseErrorKind::SortConflict(name.to_string()),
            )),
            _ => Ok(()),
        }
    }

    /// Variables in arithmetic positions are base-sort; function arguments
    /// are left alone (they must be ground, which basification checks).
    fn base_term(&mut self, t: &RawTerm) -> Result<(), ParseError> {
        match t {
            RawTerm::Sym(s) => self.assign(s, Sort::Base),
            RawTerm::Eps(inner) => self.base_term(inner),
            RawTerm::App(Op::Fun(_), _) => Ok(()),
            RawTerm::App(_, args) => args.iter().try_for_each(|a| self.base_term(a)),
            RawTerm::Num(_) | RawTerm::Minf => Ok(()),
        }
    }

    fn free_term(&mut self, t: &RawTerm) -> Result<(), ParseError> {
        match t {
            RawTerm::Sym(s) => self.assign(s, Sort::Free),
            _ => Ok(()),
        }
    }

    fn atom(&mut self, a: &AtomAt) -> Result<(), ParseError> {
        (self.line, self.col) = (a.line, a.col);
        match &a.atom {
            RawAtom::Eq(l, r) => {
                self.free_term(l)?;
                self.free_term(r)
            }
            RawAtom::Pred { symbol, args } => {
                let Some(sorts) = self.problem.predicates.get(symbol) else {
                    return Err(ParseError::new(
                        a.line,
                        a.col,
                        ParseErrorKind::UndeclaredPredicate(symbol.clone()),
                    ));
                };
                if sorts.len() != args.len() {
                    return Err(ParseError::new(
                        a.line,
                        a.col,
                        ParseErrorKind::Arity {
                            predicate: symbol.clone(),
                            expected: sorts.len(),
                            found: args.len(),
                        },
                    ));
                }
                for (t, s) in args.iter().zip(sorts) {
                    match s {
                        Sort::Base => self.base_term(t)?,
                        Sort::Free => self.free_term(t)?,
                    }
                }
                Ok(())
            }
        }
    }
}

fn resolve(problem: &RawProblem, c: ClauseAt) -> Result<RawClause, ParseError> {
    let mut inf = SortInference { problem, sorts: BTreeMap::new(), line: c.line, col: c.col };
    for k in &c.constraints {
        inf.base_term(&k.lhs)?;
        inf.base_term(&k.rhs)?;
    }
    for a in c.antecedent.iter().chain(&c.succedent) {
        inf.atom(a)?;
    }
    Ok(RawClause {
        line: c.line,
        constraints: c.constraints,
        antecedent: c.antecedent.into_iter().map(|a| a.atom).collect(),
        succedent: c.succedent.into_iter().map(|a| a.atom).collect(),
        var_sorts: inf.sorts,
    })
}
