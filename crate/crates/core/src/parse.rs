//! Text grammar shared by every object kind.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := rational | ident ['^' uint] | basis ('^' basis)* | '(' expr ')'
//! basis  := 'd' ident | '@' ident
//! ```
//!
//! `dx1` is the form basis element for coordinate `x1` and `@x1` the
//! coordinate vector field. A bare identifier is a coordinate when the chart
//! has it; otherwise a leading `d` followed by a coordinate name is a form
//! basis element. Products of basis elements are wedge products. The
//! `Display` impls of [`Polynomial`], [`DifferentialForm`] and
//! [`Multivector`] print in this grammar.

use std::iter::Peekable;
use std::str::CharIndices;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exterior::{Alternating, DifferentialForm, Multivector};
use crate::poly::{Chart, Polynomial, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Scalar,
    Form,
    Multivector,
}

/// A parsed expression of any kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Scalar(Polynomial),
    Form(DifferentialForm),
    Multivector(Multivector),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    At(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(src: &str) -> Result<(Vec<Token>, (usize, usize))> {
    let mut out = Vec::new();
    let mut chars: Peekable<CharIndices> = src.char_indices().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    let ident_tail = |chars: &mut Peekable<CharIndices>, buf: &mut String, col: &mut usize| {
        while let Some(&(_, c)) = chars.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                buf.push(c);
                chars.next();
                *col += 1;
            } else {
                break;
            }
        }
    };
    while let Some(&(_, c)) = chars.peek() {
        let (tl, tc) = (line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        let tok = if c.is_ascii_digit() {
            let mut buf = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if d.is_ascii_digit() {
                    buf.push(d);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            Tok::Int(buf.parse().expect("digits"))
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut buf = String::new();
            ident_tail(&mut chars, &mut buf, &mut col);
            Tok::Ident(buf)
        } else if c == '@' {
            chars.next();
            col += 1;
            let mut buf = String::new();
            ident_tail(&mut chars, &mut buf, &mut col);
            if buf.is_empty() {
                return Err(error(tl, tc, "expected a coordinate name after `@`"));
            }
            Tok::At(buf)
        } else {
            chars.next();
            col += 1;
            match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                other => return Err(error(tl, tc, format!("unexpected character `{other}`"))),
            }
        };
        out.push(Token {
            tok,
            line: tl,
            column: tc,
        });
    }
    Ok((out, (line, col)))
}

/// Intermediate graded value: a scalar, form or multivector.
#[derive(Clone)]
struct Value {
    kind: Kind,
    alt: Alternating,
}

impl Value {
    fn scalar(p: Polynomial) -> Self {
        let mut alt = Alternating::zero(p.chart(), 0);
        alt.add_term(Vec::new(), p);
        Self {
            kind: Kind::Scalar,
            alt,
        }
    }
}

struct Parser<'a> {
    chart: &'a Chart,
    tokens: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .map_or(self.end, |t| (t.line, t.column))
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        let (l, c) = self.here();
        Err(error(l, c, message))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn combine_kinds(&self, a: Kind, b: Kind, at: (usize, usize)) -> Result<Kind> {
        match (a, b) {
            (Kind::Scalar, k) | (k, Kind::Scalar) => Ok(k),
            (x, y) if x == y => Ok(x),
            _ => Err(error(at.0, at.1, "cannot combine form and multivector bases")),
        }
    }

    fn expr(&mut self) -> Result<Value> {
        let mut negate = false;
        match self.peek() {
            Some(Tok::Plus) => {
                self.bump();
            }
            Some(Tok::Minus) => {
                self.bump();
                negate = true;
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc.alt = acc.alt.negated();
        }
        loop {
            let sub = match self.peek() {
                Some(Tok::Plus) => false,
                Some(Tok::Minus) => true,
                _ => break,
            };
            let at = self.here();
            self.bump();
            let mut rhs = self.term()?;
            if sub {
                rhs.alt = rhs.alt.negated();
            }
            acc = self.add(acc, rhs, at)?;
        }
        Ok(acc)
    }

    fn add(&self, a: Value, b: Value, at: (usize, usize)) -> Result<Value> {
        let a_zero = a.alt.coeffs.is_empty();
        let b_zero = b.alt.coeffs.is_empty();
        if a_zero && a.kind == Kind::Scalar {
            return Ok(b);
        }
        if b_zero && b.kind == Kind::Scalar {
            return Ok(a);
        }
        if a.kind != b.kind || a.alt.degree != b.alt.degree {
            return Err(error(
                at.0,
                at.1,
                format!(
                    "cannot add terms of different degree ({} and {})",
                    a.alt.degree, b.alt.degree
                ),
            ));
        }
        Ok(Value {
            kind: a.kind,
            alt: a.alt.plus(&b.alt),
        })
    }

    fn term(&mut self) -> Result<Value> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            let at = self.here();
            self.bump();
            let rhs = self.factor()?;
            let kind = self.combine_kinds(acc.kind, rhs.kind, at)?;
            acc = Value {
                kind,
                alt: acc.alt.wedge(&rhs.alt),
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Value> {
        let (line, column) = self.here();
        match self.bump() {
            Some(Tok::Int(n)) => {
                let mut value = Rational::from_integer(n);
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    match self.bump() {
                        Some(Tok::Int(den)) if !den.is_zero() => {
                            value /= Rational::from_integer(den);
                        }
                        Some(Tok::Int(_)) => {
                            return Err(error(line, column, "zero denominator"));
                        }
                        _ => {
                            self.pos -= 1;
                            return self.fail("expected an integer denominator");
                        }
                    }
                }
                Ok(Value::scalar(Polynomial::constant(self.chart, value)))
            }
            Some(Tok::Ident(name)) => {
                if let Some(i) = self.chart.index_of(&name) {
                    let mut p = Polynomial::coordinate(self.chart, i);
                    if let Some(Tok::Caret) = self.peek() {
                        self.bump();
                        match self.bump() {
                            Some(Tok::Int(k)) => {
                                let k: u32 = k.try_into().map_err(|_| {
                                    error(line, column, "exponent too large")
                                })?;
                                p = p.pow(k);
                            }
                            _ => {
                                self.pos -= 1;
                                return self.fail("expected a nonnegative integer exponent");
                            }
                        }
                    }
                    return Ok(Value::scalar(p));
                }
                match name.strip_prefix('d').and_then(|rest| self.chart.index_of(rest)) {
                    Some(i) => self.basis_chain(Kind::Form, i),
                    None => Err(error(line, column, format!("unknown identifier `{name}`"))),
                }
            }
            Some(Tok::At(name)) => match self.chart.index_of(&name) {
                Some(i) => self.basis_chain(Kind::Multivector, i),
                None => Err(error(line, column, format!("unknown coordinate `{name}`"))),
            },
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => {
                        self.pos -= 1;
                        self.fail("expected `)`")
                    }
                }
            }
            Some(_) => {
                self.pos -= 1;
                self.fail("expected a number, identifier, basis element or `(`")
            }
            None => self.fail("unexpected end of input"),
        }
    }

    fn basis_chain(&mut self, kind: Kind, first: usize) -> Result<Value> {
        let mut idx = vec![first];
        while let Some(Tok::Caret) = self.peek() {
            self.bump();
            let (line, column) = self.here();
            let next = match (kind, self.bump()) {
                (Kind::Form, Some(Tok::Ident(name))) => name
                    .strip_prefix('d')
                    .and_then(|rest| self.chart.index_of(rest)),
                (Kind::Multivector, Some(Tok::At(name))) => self.chart.index_of(&name),
                _ => None,
            };
            match next {
                Some(i) => idx.push(i),
                None => return Err(error(line, column, "expected a basis element after `^`")),
            }
        }
        let mut alt = Alternating::zero(self.chart, idx.len());
        alt.add_term(idx, Polynomial::one(self.chart));
        Ok(Value { kind, alt })
    }
}

fn parse_value(chart: &Chart, src: &str) -> Result<Value> {
    let (tokens, end) = tokenize(src)?;
    let mut p = Parser {
        chart,
        tokens,
        pos: 0,
        end,
    };
    let v = p.expr()?;
    if p.pos < p.tokens.len() {
        return p.fail("unexpected trailing input");
    }
    Ok(v)
}

pub fn parse_expression(chart: &Chart, src: &str) -> Result<Expression> {
    let v = parse_value(chart, src)?;
    Ok(match v.kind {
        Kind::Scalar => Expression::Scalar(v.alt.scalar()),
        Kind::Form => Expression::Form(DifferentialForm(v.alt)),
        Kind::Multivector => Expression::Multivector(Multivector(v.alt)),
    })
}

pub fn parse_polynomial(chart: &Chart, src: &str) -> Result<Polynomial> {
    let v = parse_value(chart, src)?;
    if v.kind != Kind::Scalar {
        return Err(error(1, 1, "expected a polynomial, found a basis element"));
    }
    Ok(v.alt.scalar())
}

/// Parses a differential form. A scalar expression is read as a 0-form.
pub fn parse_form(chart: &Chart, src: &str) -> Result<DifferentialForm> {
    let v = parse_value(chart, src)?;
    match v.kind {
        Kind::Multivector => Err(error(1, 1, "expected a form, found `@` basis elements")),
        _ => Ok(DifferentialForm(v.alt)),
    }
}

/// Parses a differential form of a fixed degree; the literal `0` is accepted
/// as the zero form of that degree.
pub fn parse_form_of_degree(chart: &Chart, src: &str, degree: usize) -> Result<DifferentialForm> {
    let f = parse_form(chart, src)?;
    if f.is_zero() {
        return Ok(DifferentialForm::zero(chart, degree));
    }
    if f.degree() != degree {
        return Err(Error::DegreeMismatch {
            expected: degree,
            found: f.degree(),
        });
    }
    Ok(f)
}

/// Parses a multivector field. A scalar expression is read as degree 0.
pub fn parse_multivector(chart: &Chart, src: &str) -> Result<Multivector> {
    let v = parse_value(chart, src)?;
    match v.kind {
        Kind::Form => Err(error(1, 1, "expected a multivector, found `d` basis elements")),
        _ => Ok(Multivector(v.alt)),
    }
}

pub fn parse_multivector_of_degree(chart: &Chart, src: &str, degree: usize) -> Result<Multivector> {
    let m = parse_multivector(chart, src)?;
    if m.is_zero() {
        return Ok(Multivector::zero(chart, degree));
    }
    if m.degree() != degree {
        return Err(Error::DegreeMismatch {
            expected: degree,
            found: m.degree(),
        });
    }
    Ok(m)
}
