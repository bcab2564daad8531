//! Magnetic cotangent bundles.
//!
//! The phase space of a charged particle on `R^n` carries the 2-form
//! `omega_B = sum_i dp_i ^ dx_i + B`, where the magnetic field `B` is a
//! 2-form in the configuration coordinates. `omega_B` stays nondegenerate
//! when `dB != 0`, so it still inverts to a bivector `pi_B`; the bracket
//! `{f, g} = pi_B(df, dg)` then fails the Jacobi identity by the closed
//! 3-form `phi = d omega_B = dB`.
//!
//! With the conventions of [`crate::exterior`] the identities hold with the
//! fixed signs recorded in [`SIGMA_SCHOUTEN`], [`SIGMA_JACOBI`] and
//! [`SIGMA_BRACKETS`].

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exterior::{
    apply_form, apply_multivector, apply_vf, commutator, contract, d, lie_derivative,
    schouten_square, sharp, wedge, DifferentialForm, Multivector, VectorField,
};
use crate::poly::{integer, Chart, Polynomial, Rational};
use crate::report::Report;

/// `(1/2) [pi, pi](df, dg, dh) = SIGMA_SCHOUTEN * ({{f,g},h} + cyc)`.
pub const SIGMA_SCHOUTEN: i32 = -1;
/// `{{f,g},h} + cyc = SIGMA_JACOBI * phi(H_f, H_g, H_h)`.
pub const SIGMA_JACOBI: i32 = 1;
/// `H_{f,g} + [H_f, H_g] = SIGMA_BRACKETS * sharp(pi, phi(H_f, H_g, .))`.
pub const SIGMA_BRACKETS: i32 = -1;
/// Sign of the chain `phi(H_p3, H_p1, .)`, its `sharp`, and the value on
/// `x1 p2 - x2 p1` for the example field, relative to
/// `x1 dx2 -> x1 @p2 -> x1^2`, which is what inserting `H_p1` before
/// `H_p3` gives.
pub const CONTRACTION_SIGN: i32 = -1;

pub(crate) fn signed(p: &Polynomial, sign: i32) -> Polynomial {
    if sign < 0 {
        -p
    } else {
        p.clone()
    }
}

/// `sum_i dp_i ^ dx_i` on the phase chart of dimension `2n`.
pub fn canonical_form(n: usize) -> DifferentialForm {
    let chart = Chart::phase_space(n);
    let one = Polynomial::one(&chart);
    (0..n).fold(DifferentialForm::zero(&chart, 2), |acc, i| {
        acc.try_add(&DifferentialForm::term(&one, &[n + i, i]).expect("in range"))
            .expect("same chart")
    })
}

/// `sum_i @x_i ^ @p_i`, the inverse of [`canonical_form`].
pub fn canonical_bivector(n: usize) -> Multivector {
    let chart = Chart::phase_space(n);
    let one = Polynomial::one(&chart);
    (0..n).fold(Multivector::zero(&chart, 2), |acc, i| {
        acc.try_add(&Multivector::term(&one, &[i, n + i]).expect("in range"))
            .expect("same chart")
    })
}

/// The non-closed magnetic field `x2^2 dx2^dx3 + x1 x2 dx1^dx3` on `R^3`.
pub fn example_magnetic_field() -> DifferentialForm {
    let chart = Chart::configuration(3);
    let x1 = Polynomial::coordinate(&chart, 0);
    let x2 = Polynomial::coordinate(&chart, 1);
    DifferentialForm::term(&(&x2 * &x2), &[1, 2])
        .and_then(|a| a.try_add(&DifferentialForm::term(&(&x1 * &x2), &[0, 2])?))
        .expect("valid example field")
}

/// Determinant by Laplace expansion along rows, memoised on column subsets.
fn determinant(m: &[Vec<Polynomial>], chart: &Chart) -> Polynomial {
    fn go(
        m: &[Vec<Polynomial>],
        row: usize,
        mask: u64,
        memo: &mut HashMap<u64, Polynomial>,
        chart: &Chart,
    ) -> Polynomial {
        if row == m.len() {
            return Polynomial::one(chart);
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let mut acc = Polynomial::zero(chart);
        let mut position = 0;
        for c in 0..m.len() {
            if mask & (1 << c) != 0 {
                continue;
            }
            if !m[row][c].is_zero() {
                let minor = go(m, row + 1, mask | (1 << c), memo, chart);
                let term = &m[row][c] * &minor;
                acc = if position % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            position += 1;
        }
        memo.insert(mask, acc.clone());
        acc
    }
    assert!(m.len() < 64, "matrix too large");
    go(m, 0, 0, &mut HashMap::new(), chart)
}

fn minor_matrix(m: &[Vec<Polynomial>], skip_row: usize, skip_col: usize) -> Vec<Vec<Polynomial>> {
    m.iter()
        .enumerate()
        .filter(|&(r, _)| r != skip_row)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|&(c, _)| c != skip_col)
                .map(|(_, v)| v.clone())
                .collect()
        })
        .collect()
}

/// Full antisymmetric coefficient matrix of a 2-form,
/// `omega = sum_{i<j} Omega_{ij} dx^i ^ dx^j`.
pub fn form_matrix(omega: &DifferentialForm) -> Result<Vec<Vec<Polynomial>>> {
    if omega.degree() != 2 {
        return Err(Error::DegreeMismatch {
            expected: 2,
            found: omega.degree(),
        });
    }
    let dim = omega.chart().dim();
    Ok((0..dim)
        .map(|i| (0..dim).map(|j| omega.coefficient(&[i, j])).collect())
        .collect())
}

/// Inverts a nondegenerate 2-form to the bivector whose matrix is the
/// inverse of the form's matrix. With first-slot conventions this makes
/// `sharp(pi, contract(omega, X)) = X` for every vector field `X`.
///
/// Only forms whose determinant is a nonzero constant are accepted; other
/// inverses would need rational-function coefficients.
pub fn invert_two_form(omega: &DifferentialForm) -> Result<Multivector> {
    let m = form_matrix(omega)?;
    let chart = omega.chart();
    let det = determinant(&m, chart);
    let det_value = match det.as_constant() {
        Some(v) if v.is_zero() => return Err(Error::DegenerateForm),
        Some(v) => v,
        None => return Err(Error::NonConstantDeterminant(det.to_string())),
    };
    let inv_det = Rational::one() / det_value;
    let dim = chart.dim();
    let mut inverse = vec![vec![Polynomial::zero(chart); dim]; dim];
    for (i, row) in inverse.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate().skip(i + 1) {
            // (Omega^{-1})_{ij} = cofactor_{ji} / det
            let cof = determinant(&minor_matrix(&m, j, i), chart);
            let cof = if (i + j) % 2 == 0 { cof } else { -cof };
            *slot = cof.scale(&inv_det);
        }
    }
    Multivector::bivector_from_matrix(chart, &inverse)
}

/// Magnetic phase space `T*R^n` with its almost-Poisson structure.
#[derive(Debug, Clone)]
pub struct PhaseSpace {
    n: usize,
    chart: Chart,
    base_chart: Chart,
    magnetic: DifferentialForm,
    omega: DifferentialForm,
    pi: Multivector,
    phi: DifferentialForm,
}

/// Builds `T*_B R^n`; `b` may live on `x1..xn` or on the full phase chart.
pub fn make_phase_space(n: usize, b: &DifferentialForm) -> Result<PhaseSpace> {
    PhaseSpace::new(n, b)
}

impl PhaseSpace {
    pub fn new(n: usize, b: &DifferentialForm) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("base dimension must be at least 1".into()));
        }
        if b.degree() != 2 && !b.is_zero() {
            return Err(Error::DegreeMismatch {
                expected: 2,
                found: b.degree(),
            });
        }
        let chart = Chart::phase_space(n);
        let base_chart = Chart::configuration(n);
        let base_b = if b.chart() == &base_chart {
            b.clone()
        } else if b.chart() == &chart {
            b.restrict(&base_chart).map_err(|_| {
                Error::InvalidMagneticField(format!(
                    "`{b}` involves momentum coordinates"
                ))
            })?
        } else {
            chart.ensure_same(b.chart())?;
            unreachable!()
        };
        let base_b = if base_b.is_zero() {
            DifferentialForm::zero(&base_chart, 2)
        } else {
            base_b
        };
        let magnetic = base_b.embed(&chart)?;
        let omega = canonical_form(n).try_add(&magnetic)?;
        let pi = invert_two_form(&omega)?;
        let phi = d(&omega);
        Ok(Self {
            n,
            chart,
            base_chart,
            magnetic: base_b,
            omega,
            pi,
            phi,
        })
    }

    /// The three-dimensional phase space with [`example_magnetic_field`].
    pub fn example() -> Self {
        Self::new(3, &example_magnetic_field()).expect("example phase space")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn base_chart(&self) -> &Chart {
        &self.base_chart
    }

    /// The magnetic 2-form on the configuration chart.
    pub fn magnetic_field(&self) -> &DifferentialForm {
        &self.magnetic
    }

    pub fn omega(&self) -> &DifferentialForm {
        &self.omega
    }

    pub fn pi(&self) -> &Multivector {
        &self.pi
    }

    pub fn phi(&self) -> &DifferentialForm {
        &self.phi
    }

    /// `x_i` as a phase-space function.
    pub fn x(&self, i: usize) -> Polynomial {
        Polynomial::coordinate(&self.chart, i)
    }

    /// `p_i` as a phase-space function.
    pub fn p(&self, i: usize) -> Polynomial {
        Polynomial::coordinate(&self.chart, self.n + i)
    }

    /// `{f, g} = pi(df, dg)`.
    pub fn bracket(&self, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
        self.chart.ensure_same(f.chart())?;
        self.chart.ensure_same(g.chart())?;
        apply_multivector(
            &self.pi,
            &[DifferentialForm::exact(f), DifferentialForm::exact(g)],
        )
    }

    /// `H_f = {., f}`, i.e. `H_f^i = sum_j pi^{ij} d_j f`.
    pub fn ham_vf(&self, f: &Polynomial) -> Result<VectorField> {
        self.chart.ensure_same(f.chart())?;
        let m = self.pi.matrix()?;
        let grad: Vec<Polynomial> = (0..self.chart.dim()).map(|j| f.partial_index(j)).collect();
        let comps: Vec<Polynomial> = m
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&grad)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Polynomial::zero(&self.chart), |acc, (a, b)| &acc + &(a * b))
            })
            .collect();
        Multivector::vector_field(&self.chart, &comps)
    }

    /// `{{f,g},h} + {{g,h},f} + {{h,f},g}`.
    pub fn jacobi_defect(
        &self,
        f: &Polynomial,
        g: &Polynomial,
        h: &Polynomial,
    ) -> Result<Polynomial> {
        let a = self.bracket(&self.bracket(f, g)?, h)?;
        let b = self.bracket(&self.bracket(g, h)?, f)?;
        let c = self.bracket(&self.bracket(h, f)?, g)?;
        Ok(&(&a + &b) + &c)
    }

    /// Compares `[pi, pi]` with `2 (wedge^3 sharp)(phi)`, whose components
    /// are `2 phi(sharp dx^i, sharp dx^j, sharp dx^k)`.
    pub fn check_twisted(&self) -> TwistedCheck {
        let lhs = schouten_square(&self.pi).expect("pi is a bivector");
        let dim = self.chart.dim();
        let sharps: Vec<VectorField> = (0..dim)
            .map(|i| {
                let dxi = DifferentialForm::exact(&Polynomial::coordinate(&self.chart, i));
                sharp(&self.pi, &dxi).expect("1-form into bivector")
            })
            .collect();
        let two = Polynomial::constant(&self.chart, integer(2));
        let mut rhs = Multivector::zero(&self.chart, 3);
        for i in 0..dim {
            for j in i + 1..dim {
                for k in j + 1..dim {
                    let v = apply_form(
                        &self.phi,
                        &[sharps[i].clone(), sharps[j].clone(), sharps[k].clone()],
                    )
                    .expect("3-form on three vectors");
                    if v.is_zero() {
                        continue;
                    }
                    let term = Multivector::term(&(&two * &v), &[i, j, k]).expect("in range");
                    rhs = rhs.try_add(&term).expect("same chart");
                }
            }
        }
        TwistedCheck { lhs, rhs }
    }

    pub fn eq_jacobi_check(
        &self,
        f: &Polynomial,
        g: &Polynomial,
        h: &Polynomial,
    ) -> Result<JacobiCheck> {
        let defect = self.jacobi_defect(f, g, h)?;
        let fields = [self.ham_vf(f)?, self.ham_vf(g)?, self.ham_vf(h)?];
        let phi_value = apply_form(&self.phi, &fields)?;
        Ok(JacobiCheck { defect, phi_value })
    }

    /// `phi(X, Y, .)` with `X` in the first slot.
    pub fn phi_contracted(&self, x: &VectorField, y: &VectorField) -> Result<DifferentialForm> {
        contract(&contract(&self.phi, x)?, y)
    }

    pub fn eq_brackets_check(&self, f: &Polynomial, g: &Polynomial) -> Result<BracketsCheck> {
        let hf = self.ham_vf(f)?;
        let hg = self.ham_vf(g)?;
        let lhs = self
            .ham_vf(&self.bracket(f, g)?)?
            .try_add(&commutator(&hf, &hg)?)?;
        let rhs = sharp(&self.pi, &self.phi_contracted(&hf, &hg)?)?;
        Ok(BracketsCheck { lhs, rhs })
    }

    pub fn liouville_check(&self, f: &Polynomial) -> Result<LiouvilleCheck> {
        let hamiltonian = self.ham_vf(f)?;
        let lie_omega = lie_derivative(&hamiltonian, &self.omega)?;
        let mut lower = DifferentialForm::function(&Polynomial::one(&self.chart));
        for _ in 1..self.n {
            lower = wedge(&lower, &self.omega)?;
        }
        let volume = wedge(&lower, &self.omega)?;
        let lie_volume = lie_derivative(&hamiltonian, &volume)?;
        let n = Polynomial::constant(&self.chart, integer(self.n as i64));
        let lower_power_wedge = wedge(&lower, &lie_omega)?;
        let factored = lower_power_wedge.times(&n)?;
        Ok(LiouvilleCheck {
            hamiltonian,
            lie_omega,
            lower_power_wedge,
            volume,
            lie_volume,
            factored,
        })
    }
}

#[derive(Debug, Clone)]
pub struct TwistedCheck {
    pub lhs: Multivector,
    pub rhs: Multivector,
}

impl TwistedCheck {
    pub fn passed(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn report(&self) -> Report {
        Report::new("check-twisted", self.passed(), &self.lhs, &self.rhs)
            .with_meta("comparison", "exact")
    }
}

#[derive(Debug, Clone)]
pub struct JacobiCheck {
    pub defect: Polynomial,
    /// `phi(H_f, H_g, H_h)`.
    pub phi_value: Polynomial,
}

impl JacobiCheck {
    pub fn passed(&self) -> bool {
        self.defect == signed(&self.phi_value, SIGMA_JACOBI)
    }

    pub fn report(&self) -> Report {
        Report::new("jacobiator", self.passed(), &self.defect, &self.phi_value)
            .with_meta("comparison", "lhs = sigma_J * rhs")
            .with_meta("sigma_J", SIGMA_JACOBI)
    }
}

#[derive(Debug, Clone)]
pub struct BracketsCheck {
    /// `H_{f,g} + [H_f, H_g]`.
    pub lhs: VectorField,
    /// `sharp(pi, phi(H_f, H_g, .))`.
    pub rhs: VectorField,
}

impl BracketsCheck {
    pub fn passed(&self) -> bool {
        if SIGMA_BRACKETS < 0 {
            self.lhs == self.rhs.neg()
        } else {
            self.lhs == self.rhs
        }
    }

    pub fn report(&self) -> Report {
        Report::new("hamiltonian-brackets", self.passed(), &self.lhs, &self.rhs)
            .with_meta("comparison", "lhs = sigma_5 * rhs")
            .with_meta("sigma_5", SIGMA_BRACKETS)
    }
}

#[derive(Debug, Clone)]
pub struct LiouvilleCheck {
    pub hamiltonian: VectorField,
    /// `L_{H_f} omega`.
    pub lie_omega: DifferentialForm,
    /// `omega^{n-1} ^ L_{H_f} omega`.
    pub lower_power_wedge: DifferentialForm,
    /// `omega^n`.
    pub volume: DifferentialForm,
    /// `L_{H_f} omega^n`.
    pub lie_volume: DifferentialForm,
    /// `n omega^{n-1} ^ L_{H_f} omega`.
    pub factored: DifferentialForm,
}

impl LiouvilleCheck {
    pub fn passed(&self) -> bool {
        self.lie_volume.is_zero() && self.lie_volume == self.factored
    }

    pub fn report(&self) -> Report {
        Report::new("liouville", self.passed(), &self.lie_volume, &self.factored)
            .with_meta("hamiltonian", self.hamiltonian.to_string())
            .with_meta("lie_derivative_omega", self.lie_omega.to_string())
            .with_meta("volume", self.volume.to_string())
            .with_meta("comparison", "both sides zero")
    }
}

/// Pairing matrix product `Omega * Pi`, exposed for inverse checks.
pub fn pairing_product(omega: &DifferentialForm, pi: &Multivector) -> Result<Vec<Vec<Polynomial>>> {
    omega.chart().ensure_same(pi.chart())?;
    let a = form_matrix(omega)?;
    let b = pi.matrix()?;
    let dim = a.len();
    let chart = omega.chart();
    Ok((0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    (0..dim).fold(Polynomial::zero(chart), |acc, k| &acc + &(&a[i][k] * &b[k][j]))
                })
                .collect()
        })
        .collect())
}

/// Applies `H_f` to `g`; equal to `{g, f}`.
pub fn hamiltonian_derivative(ps: &PhaseSpace, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
    apply_vf(&ps.ham_vf(f)?, g)
}
