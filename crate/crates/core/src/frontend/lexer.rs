use num_bigint::BigInt;
use num_traits::{Num, Zero};

use super::ParseError;
use crate::syntax::{Rational, Rel};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Num(Rational),
    Minf,
    Eps,
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Bars,
    Arrow,
    Tilde,
    Rel(Rel),
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{}`", s),
            Tok::Num(q) => format!("number `{}`", q),
            Tok::Eof => "end of input".to_string(),
            t => format!("`{}`", t.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Minf => "@minf",
            Tok::Eps => "@eps",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Colon => ":",
            Tok::Bars => "||",
            Tok::Arrow => "->",
            Tok::Tilde => "~",
            Tok::Rel(r) => r.symbol(),
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            _ => "",
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let peek = chars.get(i + 1).copied();
        let (tok, len) = if is_ident_start(c) {
            let end = (i..chars.len()).find(|&j| !is_ident_char(chars[j])).unwrap_or(chars.len());
            (Tok::Ident(chars[i..end].iter().collect()), end - i)
        } else if c.is_ascii_digit() {
            let (q, len) = lex_number(&chars[i..]).map_err(|m| ParseError::syntax(l0, c0, m))?;
            (Tok::Num(q), len)
        } else if c == '@' {
            let end = (i + 1..chars.len()).find(|&j| !is_ident_char(chars[j])).unwrap_or(chars.len());
            let word: String = chars[i + 1..end].iter().collect();
            match word.as_str() {
                "minf" => (Tok::Minf, end - i),
                "eps" => (Tok::Eps, end - i),
                _ => return Err(ParseError::syntax(l0, c0, format!("unknown constant `@{}`", word))),
            }
        } else {
            match (c, peek) {
                ('|', Some('|')) => (Tok::Bars, 2),
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('<', Some('=')) => (Tok::Rel(Rel::Le), 2),
                ('>', Some('=')) => (Tok::Rel(Rel::Ge), 2),
                ('!', Some('=')) => (Tok::Rel(Rel::Ne), 2),
                ('<', _) => (Tok::Rel(Rel::Lt), 1),
                ('>', _) => (Tok::Rel(Rel::Gt), 1),
                ('=', _) => (Tok::Rel(Rel::Eq), 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                (',', _) => (Tok::Comma, 1),
                ('.', _) => (Tok::Dot, 1),
                (':', _) => (Tok::Colon, 1),
                ('~', _) => (Tok::Tilde, 1),
                ('+', _) => (Tok::Plus, 1),
                ('-', _) => (Tok::Minus, 1),
                ('*', _) => (Tok::Star, 1),
                ('/', _) => (Tok::Slash, 1),
                _ => return Err(ParseError::syntax(l0, c0, format!("unexpected character `{}`", c))),
            }
        };
        out.push(Spanned { tok, line: l0, col: c0 });
        i += len;
        col += len;
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

/// Integer, decimal (`2.5`) or fraction (`1/3`, no spaces) literal.
fn lex_number(s: &[char]) -> Result<(Rational, usize), String> {
    let digits = |from: usize| (from..s.len()).find(|&j| !s[j].is_ascii_digit()).unwrap_or(s.len());
    let int_end = digits(0);
    let int: String = s[..int_end].iter().collect();
    let big = |t: &str| BigInt::from_str_radix(t, 10).expect("digits only");
    if int_end + 1 < s.len() && s[int_end] == '.' && s[int_end + 1].is_ascii_digit() {
        let frac_end = digits(int_end + 1);
        let frac: String = s[int_end + 1..frac_end].iter().collect();
        let den = BigInt::from(10).pow(frac.len() as u32);
        return Ok((Rational::new(big(&int) * &den + big(&frac), den), frac_end));
    }
    if int_end + 1 < s.len() && s[int_end] == '/' && s[int_end + 1].is_ascii_digit() {
        let den_end = digits(int_end + 1);
        let den = big(&s[int_end + 1..den_end].iter().collect::<String>());
        if den.is_zero() {
            return Err("division by zero in numeric literal".into());
        }
        return Ok((Rational::new(big(&int), den), den_end));
    }
    Ok((Rational::from_integer(big(&int)), int_end))
}
