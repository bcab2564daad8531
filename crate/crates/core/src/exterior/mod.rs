//! Graded exterior calculus with polynomial coefficients.
//!
//! Differential forms and multivector fields share one storage scheme: a map
//! from strictly increasing coordinate-index tuples to nonzero polynomial
//! coefficients. Inserting a term under an unsorted tuple re-signs it by the
//! parity of the sorting permutation; a repeated index drops it.
//!
//! Sign conventions used throughout:
//!
//! * a k-form evaluates on vectors by the determinant rule,
//!   `(dx^i ^ dx^j)(X, Y) = X^i Y^j - X^j Y^i`, and likewise for
//!   multivectors on 1-forms;
//! * [`contract`] inserts the vector into the first slot;
//! * [`sharp`] inserts the 1-form into the first slot of the bivector,
//!   `sharp(pi, alpha)^j = sum_i pi^{ij} alpha_i`;
//! * [`schouten_square`] uses
//!   `[pi,pi]^{ijk} = 2 sum_l (pi^{il} d_l pi^{jk} + pi^{jl} d_l pi^{ki} + pi^{kl} d_l pi^{ij})`.

mod calculus;
mod form;
mod multivector;

use std::collections::BTreeMap;
use std::fmt;

use crate::poly::{Chart, Polynomial};

pub use calculus::{
    apply_form, apply_multivector, apply_vf, commutator, contract, d, divergence_of_2form,
    lie_derivative, schouten_square, sharp, wedge,
};
pub use form::DifferentialForm;
pub use multivector::{Multivector, VectorField};

/// Sorts `indices` in place and returns the permutation sign, or `None` when
/// an index repeats.
pub(crate) fn sort_with_sign(indices: &mut [usize]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..indices.len() {
        let mut j = i;
        while j > 0 && indices[j - 1] > indices[j] {
            indices.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if indices.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Alternating {
    pub(crate) chart: Chart,
    pub(crate) degree: usize,
    pub(crate) coeffs: BTreeMap<Vec<usize>, Polynomial>,
}

impl Alternating {
    pub(crate) fn zero(chart: &Chart, degree: usize) -> Self {
        Self {
            chart: chart.clone(),
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub(crate) fn add_term(&mut self, mut indices: Vec<usize>, coeff: Polynomial) {
        debug_assert_eq!(indices.len(), self.degree);
        if coeff.is_zero() {
            return;
        }
        let Some(sign) = sort_with_sign(&mut indices) else {
            return;
        };
        let coeff = if sign < 0 { -coeff } else { coeff };
        match self.coeffs.entry(indices) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Signed coefficient for an arbitrary index tuple.
    pub(crate) fn component(&self, indices: &[usize]) -> Polynomial {
        let mut idx = indices.to_vec();
        match sort_with_sign(&mut idx) {
            None => Polynomial::zero(&self.chart),
            Some(sign) => match self.coeffs.get(&idx) {
                None => Polynomial::zero(&self.chart),
                Some(c) if sign < 0 => -c,
                Some(c) => c.clone(),
            },
        }
    }

    pub(crate) fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub(crate) fn negated(&self) -> Self {
        Self {
            chart: self.chart.clone(),
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }

    pub(crate) fn times(&self, factor: &Polynomial) -> Self {
        let mut out = Self::zero(&self.chart, self.degree);
        for (k, c) in &self.coeffs {
            out.add_term(k.clone(), c * factor);
        }
        out
    }

    pub(crate) fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.chart, self.degree + other.degree);
        for (ka, ca) in &self.coeffs {
            for (kb, cb) in &other.coeffs {
                let idx: Vec<usize> = ka.iter().chain(kb).copied().collect();
                out.add_term(idx, ca * cb);
            }
        }
        out
    }

    /// Inserts a dense degree-1 object into the first slot.
    pub(crate) fn insert_first(&self, v: &[Polynomial]) -> Self {
        debug_assert!(self.degree >= 1);
        let mut out = Self::zero(&self.chart, self.degree - 1);
        for (k, c) in &self.coeffs {
            for (r, &i) in k.iter().enumerate() {
                if v[i].is_zero() {
                    continue;
                }
                let rest: Vec<usize> = k
                    .iter()
                    .enumerate()
                    .filter(|&(s, _)| s != r)
                    .map(|(_, &j)| j)
                    .collect();
                let term = c * &v[i];
                out.add_term(rest, if r % 2 == 1 { -term } else { term });
            }
        }
        out
    }

    /// Dense components of a degree-1 object.
    pub(crate) fn dense(&self) -> Vec<Polynomial> {
        debug_assert_eq!(self.degree, 1);
        (0..self.chart.dim()).map(|i| self.component(&[i])).collect()
    }

    /// The scalar of a degree-0 object.
    pub(crate) fn scalar(&self) -> Polynomial {
        debug_assert_eq!(self.degree, 0);
        self.coeffs
            .get(&Vec::new())
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(&self.chart))
    }

    pub(crate) fn write(&self, f: &mut fmt::Formatter<'_>, basis_prefix: &str) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        if self.degree == 0 {
            return write!(f, "{}", self.scalar());
        }
        for (n, (key, coeff)) in self.coeffs.iter().enumerate() {
            let basis = key
                .iter()
                .map(|&i| format!("{basis_prefix}{}", self.chart.name(i)))
                .collect::<Vec<_>>()
                .join("^");
            let single = coeff.num_terms() == 1;
            let negative = single && coeff.leading_is_negative();
            match (n, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let body = if negative { -coeff } else { coeff.clone() };
            if !single {
                write!(f, "({body})*{basis}")?;
            } else if body.as_constant().is_some_and(|c| num_traits::One::is_one(&c)) {
                f.write_str(&basis)?;
            } else {
                write!(f, "{body}*{basis}")?;
            }
        }
        Ok(())
    }
}
