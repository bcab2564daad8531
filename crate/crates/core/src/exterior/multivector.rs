use std::fmt;

use super::Alternating;
use crate::error::{Error, Result};
use crate::poly::{Chart, Polynomial};

/// A k-vector field with polynomial coefficients. Basis elements print as
/// `@x1` for the coordinate derivation d/dx1.
#[derive(Clone, PartialEq, Eq)]
pub struct Multivector(pub(crate) Alternating);

/// Degree-1 multivector. Operations taking a `VectorField` check the degree.
pub type VectorField = Multivector;

impl Multivector {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        Self(Alternating::zero(chart, degree))
    }

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

    pub fn basis(chart: &Chart, names: &[&str]) -> Result<Self> {
        let idx = names
            .iter()
            .map(|n| chart.coordinate(n))
            .collect::<Result<Vec<_>>>()?;
        Self::term(&Polynomial::one(chart), &idx)
    }

    /// Vector field from dense components.
    pub fn vector_field(chart: &Chart, components: &[Polynomial]) -> Result<Self> {
        if components.len() != chart.dim() {
            return Err(Error::DimensionMismatch {
                expected: chart.dim(),
                found: components.len(),
            });
        }
        let mut a = Alternating::zero(chart, 1);
        for (i, c) in components.iter().enumerate() {
            c.chart().ensure_same(chart)?;
            a.add_term(vec![i], c.clone());
        }
        Ok(Self(a))
    }

    /// Bivector from a full antisymmetric matrix; only entries above the
    /// diagonal are read.
    pub fn bivector_from_matrix(chart: &Chart, matrix: &[Vec<Polynomial>]) -> Result<Self> {
        let dim = chart.dim();
        if matrix.len() != dim || matrix.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.len(),
            });
        }
        let mut a = Alternating::zero(chart, 2);
        for (i, row) in matrix.iter().enumerate() {
            for (j, m) in row.iter().enumerate().skip(i + 1) {
                a.add_term(vec![i, j], m.clone());
            }
        }
        Ok(Self(a))
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

    pub fn coefficient(&self, indices: &[usize]) -> Polynomial {
        self.0.component(indices)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &Polynomial)> {
        self.0.coeffs.iter().map(|(k, c)| (k.as_slice(), c))
    }

    pub(crate) fn expect_degree(&self, degree: usize) -> Result<()> {
        if self.degree() != degree {
            return Err(Error::DegreeMismatch {
                expected: degree,
                found: self.degree(),
            });
        }
        Ok(())
    }

    /// Dense components of a vector field.
    pub fn components(&self) -> Result<Vec<Polynomial>> {
        self.expect_degree(1)?;
        Ok(self.0.dense())
    }

    /// Full antisymmetric coefficient matrix of a bivector.
    pub fn matrix(&self) -> Result<Vec<Vec<Polynomial>>> {
        self.expect_degree(2)?;
        let dim = self.chart().dim();
        Ok((0..dim)
            .map(|i| (0..dim).map(|j| self.0.component(&[i, j])).collect())
            .collect())
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

    pub fn times(&self, factor: &Polynomial) -> Result<Self> {
        self.chart().ensure_same(factor.chart())?;
        Ok(Self(self.0.times(factor)))
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.chart().ensure_same(other.chart())?;
        Ok(Self(self.0.wedge(&other.0)))
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write(f, "@")
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multivector[{}]({})", self.degree(), self)
    }
}
