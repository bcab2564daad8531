use std::fmt;

use super::Alternating;
use crate::error::{Error, Result};
use crate::poly::{Chart, Polynomial};

/// A differential k-form with polynomial coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct DifferentialForm(pub(crate) Alternating);

impl DifferentialForm {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        Self(Alternating::zero(chart, degree))
    }

    /// A function viewed as a 0-form.
    pub fn function(f: &Polynomial) -> Self {
        let mut a = Alternating::zero(f.chart(), 0);
        a.add_term(Vec::new(), f.clone());
        Self(a)
    }

    /// `coeff * dx^{i1} ^ ... ^ dx^{ik}` for arbitrary (possibly unsorted)
    /// indices.
    pub fn term(coeff: &Polynomial, indices: &[usize]) -> Result<Self> {
        let chart = coeff.chart();
        if let Some(&bad) = indices.iter().find(|&&i| i >= chart.dim()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                dim: chart.dim(),
            });
        }
        let mut a = Alternating::zero(chart, indices.len());
        a.add_term(indices.to_vec(), coeff.clone());
        Ok(Self(a))
    }

    /// `dx^{name1} ^ ... ^ dx^{namek}` by coordinate names.
    pub fn basis(chart: &Chart, names: &[&str]) -> Result<Self> {
        let idx = names
            .iter()
            .map(|n| chart.coordinate(n))
            .collect::<Result<Vec<_>>>()?;
        Self::term(&Polynomial::one(chart), &idx)
    }

    /// The exact 1-form `df`.
    pub fn exact(f: &Polynomial) -> Self {
        let chart = f.chart();
        let mut a = Alternating::zero(chart, 1);
        for i in 0..chart.dim() {
            a.add_term(vec![i], f.partial_index(i));
        }
        Self(a)
    }

    pub fn chart(&self) -> &Chart {
        &self.0.chart
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn is_zero(&self) -> bool {
        self.0.coeffs.is_empty()
    }

    /// Coefficient under an arbitrary index tuple, signed by its ordering.
    pub fn coefficient(&self, indices: &[usize]) -> Polynomial {
        self.0.component(indices)
    }

    /// Stored terms over strictly increasing index tuples.
    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &Polynomial)> {
        self.0.coeffs.iter().map(|(k, c)| (k.as_slice(), c))
    }

    /// Coefficient of a 0-form.
    pub fn as_function(&self) -> Result<Polynomial> {
        if self.degree() != 0 {
            return Err(Error::DegreeMismatch {
                expected: 0,
                found: self.degree(),
            });
        }
        Ok(self.0.scalar())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.chart().ensure_same(other.chart())?;
        if self.degree() != other.degree() {
            if other.is_zero() {
                return Ok(self.clone());
            }
            if self.is_zero() {
                return Ok(other.clone());
            }
            return Err(Error::DegreeMismatch {
                expected: self.degree(),
                found: other.degree(),
            });
        }
        Ok(Self(self.0.plus(&other.0)))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self(self.0.negated())
    }

    /// Multiplies every coefficient by a function.
    pub fn times(&self, factor: &Polynomial) -> Result<Self> {
        self.chart().ensure_same(factor.chart())?;
        Ok(Self(self.0.times(factor)))
    }

    /// Reinterprets a form on a chart that contains all of this chart's
    /// coordinates (the pullback along a coordinate projection).
    pub fn embed(&self, target: &Chart) -> Result<Self> {
        let map = self
            .chart()
            .names()
            .iter()
            .map(|n| target.coordinate(n))
            .collect::<Result<Vec<_>>>()?;
        let mut a = Alternating::zero(target, self.degree());
        for (k, c) in &self.0.coeffs {
            a.add_term(k.iter().map(|&i| map[i]).collect(), c.embed(target)?);
        }
        Ok(Self(a))
    }

    /// Restricts to a sub-chart; fails if a dropped coordinate occurs in a
    /// basis element or a coefficient.
    pub fn restrict(&self, target: &Chart) -> Result<Self> {
        let mut a = Alternating::zero(target, self.degree());
        for (k, c) in &self.0.coeffs {
            let idx = k
                .iter()
                .map(|&i| target.coordinate(self.chart().name(i)))
                .collect::<Result<Vec<_>>>()?;
            a.add_term(idx, c.restrict(target)?);
        }
        Ok(Self(a))
    }
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write(f, "d")
    }
}

impl fmt::Debug for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DifferentialForm[{}]({})", self.degree(), self)
    }
}
