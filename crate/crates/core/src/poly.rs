//! Exact multivariate polynomials over the rationals.
//!
//! Every polynomial carries the [`Chart`] it lives on. Terms are kept in a
//! sorted map from exponent vectors to nonzero coefficients, so two
//! polynomials are equal exactly when their term maps are equal.
//!
//! The arithmetic operators (`+`, `-`, `*`) panic when the charts differ;
//! use the `try_*` methods at API boundaries where the charts are not known
//! to agree.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `num / den` as an exact rational.
pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(value: i64) -> Rational {
    BigRational::from_integer(BigInt::from(value))
}

/// Ordered list of coordinate names.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Chart {
    names: Arc<[String]>,
}

impl Chart {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidChart("a chart needs at least one coordinate".into()));
        }
        for (i, name) in names.iter().enumerate() {
            let valid = name
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::InvalidChart(format!("`{name}` is not an identifier")));
            }
            if names[..i].contains(name) {
                return Err(Error::InvalidChart(format!("duplicate coordinate `{name}`")));
            }
        }
        Ok(Self {
            names: names.into(),
        })
    }

    fn numbered(prefixes: &[&str], n: usize) -> Self {
        let names: Vec<String> = prefixes
            .iter()
            .flat_map(|p| (1..=n).map(move |i| format!("{p}{i}")))
            .collect();
        Self {
            names: names.into(),
        }
    }

    /// Configuration coordinates `x1..xn`.
    pub fn configuration(n: usize) -> Self {
        assert!(n >= 1, "configuration space needs n >= 1");
        Self::numbered(&["x"], n)
    }

    /// Cotangent coordinates `x1..xn, p1..pn`.
    pub fn phase_space(n: usize) -> Self {
        assert!(n >= 1, "phase space needs n >= 1");
        Self::numbered(&["x", "p"], n)
    }

    /// Linear coordinates `c1..cd` on the dual of a `d`-dimensional algebra.
    pub fn dual(d: usize) -> Self {
        assert!(d >= 1, "dual space needs d >= 1");
        Self::numbered(&["c"], d)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coordinate(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownCoordinate(name.to_string()))
    }

    pub(crate) fn ensure_same(&self, other: &Chart) -> Result<()> {
        if Arc::ptr_eq(&self.names, &other.names) || self == other {
            Ok(())
        } else {
            Err(Error::ChartMismatch {
                left: self.names.join(","),
                right: other.names.join(","),
            })
        }
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart({})", self.names.join(","))
    }
}

pub type Exponents = Vec<u32>;

#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    chart: Chart,
    terms: BTreeMap<Exponents, Rational>,
}

impl Polynomial {
    pub fn zero(chart: &Chart) -> Self {
        Self {
            chart: chart.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(chart: &Chart, value: Rational) -> Self {
        let mut p = Self::zero(chart);
        if !value.is_zero() {
            p.terms.insert(vec![0; chart.dim()], value);
        }
        p
    }

    pub fn one(chart: &Chart) -> Self {
        Self::constant(chart, Rational::one())
    }

    /// The coordinate function with the given name.
    pub fn var(chart: &Chart, name: &str) -> Result<Self> {
        Ok(Self::coordinate(chart, chart.coordinate(name)?))
    }

    /// The coordinate function at `index`; panics when out of range.
    pub fn coordinate(chart: &Chart, index: usize) -> Self {
        assert!(index < chart.dim(), "coordinate index out of range");
        let mut exps = vec![0; chart.dim()];
        exps[index] = 1;
        let mut p = Self::zero(chart);
        p.terms.insert(exps, Rational::one());
        p
    }

    pub fn monomial(chart: &Chart, coeff: Rational, exponents: Exponents) -> Result<Self> {
        if exponents.len() != chart.dim() {
            return Err(Error::DimensionMismatch {
                expected: chart.dim(),
                found: exponents.len(),
            });
        }
        let mut p = Self::zero(chart);
        if !coeff.is_zero() {
            p.terms.insert(exponents, coeff);
        }
        Ok(p)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    /// The value of a constant polynomial, `None` otherwise.
    pub fn as_constant(&self) -> Option<Rational> {
        if !self.is_constant() {
            return None;
        }
        Some(self.terms.values().next().cloned().unwrap_or_else(Rational::zero))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    fn add_term(&mut self, exps: Exponents, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.chart.ensure_same(&other.chart)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.chart.ensure_same(&other.chart)?;
        let mut out = Self::zero(&self.chart);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero(&self.chart);
        }
        Self {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c * factor))
                .collect(),
        }
    }

    pub fn pow(&self, exponent: u32) -> Self {
        let mut acc = Self::one(&self.chart);
        for _ in 0..exponent {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative by coordinate name.
    pub fn partial(&self, coord: &str) -> Result<Self> {
        Ok(self.partial_index(self.chart.coordinate(coord)?))
    }

    pub fn partial_index(&self, index: usize) -> Self {
        let mut out = Self::zero(&self.chart);
        for (e, c) in &self.terms {
            let k = e[index];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[index] = k - 1;
            out.add_term(e2, c * integer(i64::from(k)));
        }
        out
    }

    /// Exact value at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        self.check_point_len(point.len())?;
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    term *= num_traits::pow(x.clone(), k as usize);
                }
            }
            total += term;
        }
        Ok(total)
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<f64> {
        self.check_point_len(point.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut term = c.to_f64().unwrap_or(f64::NAN);
                for (x, &k) in point.iter().zip(e) {
                    if k > 0 {
                        term *= x.powi(k as i32);
                    }
                }
                term
            })
            .sum())
    }

    fn check_point_len(&self, len: usize) -> Result<()> {
        if len != self.chart.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.chart.dim(),
                found: len,
            });
        }
        Ok(())
    }

    /// Reinterpret on a larger chart containing every coordinate of this one
    /// (by name).
    pub fn embed(&self, target: &Chart) -> Result<Self> {
        let map: Vec<usize> = self
            .chart
            .names()
            .iter()
            .map(|n| target.coordinate(n))
            .collect::<Result<_>>()?;
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.dim()];
            for (k, &slot) in e.iter().zip(&map) {
                e2[slot] = *k;
            }
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Restrict to a smaller chart; fails when a dropped coordinate appears.
    pub fn restrict(&self, target: &Chart) -> Result<Self> {
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.dim()];
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let name = self.chart.name(i);
                e2[target.coordinate(name)?] = k;
            }
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Coordinates that actually occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.chart.dim())
            .filter(|&i| self.terms.keys().any(|e| e[i] > 0))
            .collect()
    }

    /// Terms in printing order: descending total degree, then descending
    /// exponent vectors.
    pub(crate) fn sorted_terms(&self) -> Vec<(&Exponents, &Rational)> {
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        ts
    }

    /// Leading coefficient in printing order.
    pub(crate) fn leading_is_negative(&self) -> bool {
        self.sorted_terms()
            .first()
            .is_some_and(|(_, c)| c.is_negative())
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, chart: &Chart, exps: &[u32]) -> fmt::Result {
    let mut first = true;
    for (i, &k) in exps.iter().enumerate() {
        if k == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        f.write_str(chart.name(i))?;
        if k > 1 {
            write!(f, "^{k}")?;
        }
    }
    Ok(())
}

pub(crate) fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (exps, coeff)) in self.sorted_terms().into_iter().enumerate() {
            let negative = coeff.is_negative();
            match (idx, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = coeff.abs();
            let constant = exps.iter().all(|&k| k == 0);
            if constant {
                f.write_str(&fmt_rational(&mag))?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", fmt_rational(&mag))?;
                }
                write_monomial(f, &self.chart, exps)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                self.$try(rhs).expect("polynomial arithmetic across charts")
            }
        }
        impl $trait<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
