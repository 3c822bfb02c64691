//! Recursive-descent parser for the expression grammar.
//!
//! `x<digits>` is a base variable (1-based), `u<digits>` a fiber variable,
//! `u<digits>_x1x1x2` a jet coordinate counting axis repetitions, any other
//! identifier a parameter — except the reserved function names. Numbers are
//! decimal literals (optionally with an exponent part) and convert exactly
//! to rationals. `/` builds a reciprocal power, `^` takes an integer
//! exponent, optionally parenthesized and signed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Pow;

use super::{Expr, Func, JetVar, MultiIndex};
use crate::error::{Error, Result};

/// Parse against a known base dimension `n`: any mention of an axis beyond
/// `n` is a parse error, and all multi-indices come out dense of length `n`.
pub fn parse_expr(input: &str, n: usize) -> Result<Expr> {
    let tokens = lex(input)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        n: Some(n),
        max_axis: 0,
    };
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e.canon())
}

/// Parse with the base dimension inferred as the largest axis mentioned
/// (at least 1). Returns the expression and the inferred dimension.
pub fn parse_expr_infer(input: &str) -> Result<(Expr, usize)> {
    let tokens = lex(input)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        n: None,
        max_axis: 0,
    };
    let e = p.expr()?;
    p.expect_end()?;
    let n = p.max_axis.max(1);
    Ok((pad_indices(&e, n), n))
}

fn pad_indices(e: &Expr, n: usize) -> Expr {
    match e {
        Expr::Jet(jv) => {
            let mut exps = jv.index.exponents().to_vec();
            exps.resize(n, 0);
            Expr::Jet(JetVar::new(jv.fiber, MultiIndex::new(exps)))
        }
        Expr::Const(_) | Expr::Param(_) | Expr::Base(_) => e.clone(),
        Expr::Apply(f, a) => Expr::Apply(*f, Box::new(pad_indices(a, n))),
        Expr::Pow(b, x) => Expr::Pow(Box::new(pad_indices(b, n)), *x),
        Expr::Neg(a) => Expr::Neg(Box::new(pad_indices(a, n))),
        Expr::Product(fs) => Expr::Product(fs.iter().map(|f| pad_indices(f, n)).collect()),
        Expr::Sum(ts) => Expr::Sum(ts.iter().map(|t| pad_indices(t, n)).collect()),
    }
    .canon()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(input: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        let advance = |i: &mut usize, line: &mut usize, col: &mut usize| {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                advance(&mut i, &mut line, &mut col);
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                let tok = match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    _ => Tok::RParen,
                };
                out.push(Spanned {
                    tok,
                    line: tline,
                    col: tcol,
                });
                advance(&mut i, &mut line, &mut col);
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance(&mut i, &mut line, &mut col);
                }
                if i < chars.len() && chars[i] == '.' {
                    advance(&mut i, &mut line, &mut col);
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        advance(&mut i, &mut line, &mut col);
                    }
                }
                // exponent part, only when followed by digits (so `2e` stays
                // a number then identifier — rejected later as juxtaposition)
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while i < j {
                            advance(&mut i, &mut line, &mut col);
                        }
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            advance(&mut i, &mut line, &mut col);
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let value = decimal_to_rational(&text)
                    .ok_or_else(|| Error::parse(tline, tcol, format!("bad number `{text}`")))?;
                out.push(Spanned {
                    tok: Tok::Num(value),
                    line: tline,
                    col: tcol,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    advance(&mut i, &mut line, &mut col);
                }
                let text: String = chars[start..i].iter().collect();
                out.push(Spanned {
                    tok: Tok::Ident(text),
                    line: tline,
                    col: tcol,
                });
            }
            other => {
                return Err(Error::parse(
                    tline,
                    tcol,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    Ok(out)
}

/// Exact conversion of a decimal literal like `0.5`, `12`, `1.25e-3`.
fn decimal_to_rational(text: &str) -> Option<BigRational> {
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = text[pos + 1..].parse().ok()?;
            (&text[..pos], e)
        }
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().ok()?;
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut value = BigRational::from_integer(numer) / ten.clone().pow(frac_part.len() as i32);
    if exp != 0 {
        value *= ten.pow(exp);
    }
    Some(value)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    n: Option<usize>,
    max_axis: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map(|s| (s.line, s.col))
            .unwrap_or((1, 1))
    }

    fn bump(&mut self) -> Option<Spanned> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let (line, col) = self.here();
        match self.bump() {
            Some(s) if s.tok == tok => Ok(()),
            Some(s) => Err(Error::parse(
                s.line,
                s.col,
                format!("expected {what}, found {:?}", s.tok),
            )),
            None => Err(Error::parse(line, col, format!("expected {what}, found end"))),
        }
    }

    fn expect_end(&mut self) -> Result<()> {
        match self.tokens.get(self.pos) {
            None => Ok(()),
            Some(s) => Err(Error::parse(
                s.line,
                s.col,
                format!("unexpected trailing token {:?}", s.tok),
            )),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    terms.push(Expr::Neg(Box::new(self.term()?)));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    factors.push(self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.unary()?;
                    factors.push(Expr::Pow(Box::new(rhs), -1));
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::Product(factors)
        })
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr> {
        let mut e = self.primary()?;
        while matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let exp = self.exponent()?;
            e = Expr::Pow(Box::new(e), exp);
        }
        Ok(e)
    }

    fn exponent(&mut self) -> Result<i32> {
        let parenthesized = matches!(self.peek(), Some(Tok::LParen));
        if parenthesized {
            self.bump();
        }
        let negative = matches!(self.peek(), Some(Tok::Minus));
        if negative {
            self.bump();
        }
        let (line, col) = self.here();
        let value = match self.bump() {
            Some(Spanned {
                tok: Tok::Num(v), ..
            }) if v.denom() == &BigInt::from(1) => {
                let numer = v.numer();
                i32::try_from(numer.clone())
                    .map_err(|_| Error::parse(line, col, "exponent out of range"))?
            }
            _ => {
                return Err(Error::parse(line, col, "expected integer exponent"));
            }
        };
        if parenthesized {
            self.expect(Tok::RParen, "`)` after exponent")?;
        }
        Ok(if negative { -value } else { value })
    }

    fn primary(&mut self) -> Result<Expr> {
        let (line, col) = self.here();
        match self.bump() {
            Some(Spanned {
                tok: Tok::Num(v), ..
            }) => Ok(Expr::Const(v)),
            Some(Spanned {
                tok: Tok::LParen, ..
            }) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Spanned {
                tok: Tok::Ident(name),
                line,
                col,
            }) => self.ident(name, line, col),
            Some(s) => Err(Error::parse(
                s.line,
                s.col,
                format!("expected expression, found {:?}", s.tok),
            )),
            None => Err(Error::parse(line, col, "expected expression, found end")),
        }
    }

    fn ident(&mut self, name: String, line: usize, col: usize) -> Result<Expr> {
        if let Some(f) = Func::from_name(&name) {
            self.expect(Tok::LParen, &format!("`(` after function `{name}`"))?;
            let arg = self.expr()?;
            self.expect(Tok::RParen, "`)` closing function argument")?;
            return Ok(Expr::apply(f, arg));
        }
        // a leading letter followed only by digits is a coordinate
        if let Some(rest) = name.strip_prefix('x') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                let idx: usize = rest
                    .parse()
                    .map_err(|_| Error::parse(line, col, "axis index out of range"))?;
                if idx == 0 {
                    return Err(Error::parse(line, col, "axis indices are 1-based"));
                }
                self.check_axis(idx, line, col)?;
                return Ok(Expr::Base(idx - 1));
            }
        }
        if let Some(rest) = name.strip_prefix('u') {
            let (fiber_digits, suffix) = match rest.find('_') {
                Some(pos) => (&rest[..pos], Some(&rest[pos + 1..])),
                None => (rest, None),
            };
            if !fiber_digits.is_empty() && fiber_digits.bytes().all(|b| b.is_ascii_digit()) {
                let fiber: usize = fiber_digits
                    .parse()
                    .map_err(|_| Error::parse(line, col, "fiber index out of range"))?;
                if fiber == 0 {
                    return Err(Error::parse(line, col, "fiber indices are 1-based"));
                }
                match suffix {
                    None => {
                        let n = self.n.unwrap_or(0).max(self.max_axis).max(1);
                        let dim = self.n.unwrap_or(n);
                        return Ok(Expr::Jet(JetVar::new(
                            fiber - 1,
                            MultiIndex::zero(dim.max(1)),
                        )));
                    }
                    Some(sfx) => {
                        let exps = self.jet_suffix(sfx, line, col)?;
                        return Ok(Expr::Jet(JetVar::new(fiber - 1, MultiIndex::new(exps))));
                    }
                }
            }
        }
        // anything else is a parameter name
        Ok(Expr::Param(name))
    }

    fn jet_suffix(&mut self, sfx: &str, line: usize, col: usize) -> Result<Vec<u32>> {
        let bytes = sfx.as_bytes();
        let mut counts: Vec<u32> = vec![0; self.n.unwrap_or(1)];
        let mut i = 0usize;
        if bytes.is_empty() {
            return Err(Error::parse(line, col, "empty jet multi-index suffix"));
        }
        while i < bytes.len() {
            if bytes[i] != b'x' {
                return Err(Error::parse(
                    line,
                    col,
                    format!("bad jet multi-index suffix `{sfx}`"),
                ));
            }
            i += 1;
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if start == i {
                return Err(Error::parse(
                    line,
                    col,
                    format!("bad jet multi-index suffix `{sfx}`"),
                ));
            }
            let axis: usize = sfx[start..i]
                .parse()
                .map_err(|_| Error::parse(line, col, "axis index out of range"))?;
            if axis == 0 {
                return Err(Error::parse(line, col, "axis indices are 1-based"));
            }
            self.check_axis(axis, line, col)?;
            if counts.len() < axis {
                counts.resize(axis, 0);
            }
            counts[axis - 1] += 1;
        }
        if let Some(n) = self.n {
            counts.resize(n, 0);
        }
        Ok(counts)
    }

    fn check_axis(&mut self, axis_one_based: usize, line: usize, col: usize) -> Result<()> {
        if let Some(n) = self.n {
            if axis_one_based > n {
                return Err(Error::parse(
                    line,
                    col,
                    format!("axis x{axis_one_based} exceeds base dimension {n}"),
                ));
            }
        }
        self.max_axis = self.max_axis.max(axis_one_based);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Expr, Func};
    use super::*;

    #[test]
    fn parses_lagrangian_density() {
        let e = parse_expr("0.5*u1_x1^2", 1).unwrap();
        let expect = (Expr::rational(1, 2) * Expr::jet(0, vec![1]).pow(2)).canon();
        assert_eq!(e, expect);
    }

    #[test]
    fn parses_parameters_and_functions() {
        let e = parse_expr("eta*u1 + sin(x1)", 1).unwrap();
        let expect =
            (Expr::param("eta") * Expr::jet(0, vec![0]) + Expr::apply(Func::Sin, Expr::base(0)))
                .canon();
        assert_eq!(e, expect);
    }

    #[test]
    fn division_becomes_reciprocal_power() {
        let e = parse_expr("1/3", 1).unwrap();
        assert_eq!(e, Expr::rational(1, 3));
        let f = parse_expr("x1/x2", 2).unwrap();
        assert_eq!(f, (Expr::base(0) * Expr::base(1).pow(-1)).canon());
    }

    #[test]
    fn jet_suffix_counts_repetitions_in_any_order() {
        let a = parse_expr("u1_x1x1x2", 2).unwrap();
        let b = parse_expr("u1_x2x1x1", 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, Expr::jet(0, vec![2, 1]));
    }

    #[test]
    fn axis_beyond_dimension_is_rejected() {
        let err = parse_expr("x3", 2).unwrap_err();
        assert!(matches!(err, Error::Parse { col: 1, line: 1, .. }));
        assert!(parse_expr("u1_x3", 2).is_err());
    }

    #[test]
    fn infer_dimension_from_text() {
        let (e, n) = parse_expr_infer("u1_x1x1 + u1_x2x2").unwrap();
        assert_eq!(n, 2);
        assert_eq!(e, (Expr::jet(0, vec![2, 0]) + Expr::jet(0, vec![0, 2])).canon());
    }

    #[test]
    fn exponent_forms() {
        assert_eq!(parse_expr("x1^2", 1).unwrap(), Expr::base(0).pow(2));
        assert_eq!(parse_expr("x1^(-1)", 1).unwrap(), Expr::base(0).pow(-1));
        assert_eq!(parse_expr("x1^-1", 1).unwrap(), Expr::base(0).pow(-1));
        assert!(parse_expr("x1^x1", 1).is_err());
    }

    #[test]
    fn error_positions_are_reported() {
        let err = parse_expr("x1 + @", 1).unwrap_err();
        match err {
            Error::Parse { line, col, .. } => {
                assert_eq!((line, col), (1, 6));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn scientific_literals_are_exact() {
        let e = parse_expr("1.25e-2", 1).unwrap();
        assert_eq!(e, Expr::rational(1, 80));
    }

    #[test]
    fn roundtrip_is_stable() {
        for text in [
            "0.5*u1_x1^2",
            "u1_x1x1 + u1_x2x2",
            "eta*u1 + sin(x1)*cos(x2)",
            "x1 - 2*x2 + u2_x1x2^3",
            "(1 + x1)^3*u1^(-2)",
            "-u1_x1x1",
        ] {
            let (e, n) = parse_expr_infer(text).unwrap();
            let printed = e.to_string();
            let reparsed = parse_expr(&printed, n.max(2)).unwrap();
            let padded = parse_expr(&printed, n).unwrap();
            assert_eq!(padded, e, "round-trip changed `{text}` -> `{printed}`");
            // printing is also stable against re-printing
            assert_eq!(reparsed.to_string(), printed);
        }
    }
}
