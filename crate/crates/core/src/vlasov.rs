//! One-species Vlasov bracket in a fixed background magnetic field,
//! restricted to linear functionals `F_a(f) = integral of f a` over a box.
//!
//! The full multi-species bracket with dynamical fields reduces to the
//! bracket used here term by term:
//!
//! - `f_s {F_f, G_f}_CAN / m_s`: kept, with one species and `m = 1`;
//! - `e_s f_s B . (F_v x G_v) / (m_s^2 c)`: kept, with `e = m = c = 1`;
//! - the `g_s E` term: dropped, no magnetic charges are carried;
//! - the `F_E`, `F_B` coupling terms and the `curl` term: dropped, the
//!   functionals do not depend on the fields, which stay fixed.
//!
//! For a linear functional the functional derivative is the kernel itself,
//! so brackets of linear functionals are linear functionals whose kernel
//! is the phase-space bracket of the kernels. Velocities are the momentum
//! coordinates `p1..p3`.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exterior::{apply_vf, contract, divergence_of_2form, sharp, DifferentialForm, VectorField};
use crate::magnetic::PhaseSpace;
use crate::poly::{integer, Chart, Polynomial, Rational};
use crate::report::Report;

/// Product of closed intervals, one per chart coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationBox {
    chart: Chart,
    bounds: Vec<(Rational, Rational)>,
}

impl IntegrationBox {
    pub fn new(chart: &Chart, bounds: Vec<(Rational, Rational)>) -> Result<Self> {
        if bounds.len() != chart.dim() {
            return Err(Error::DimensionMismatch {
                expected: chart.dim(),
                found: bounds.len(),
            });
        }
        if let Some((i, (lo, hi))) = bounds.iter().enumerate().find(|(_, (lo, hi))| lo >= hi) {
            return Err(Error::InvalidBox(format!(
                "{}: lower bound {lo} is not below upper bound {hi}",
                chart.name(i)
            )));
        }
        Ok(Self {
            chart: chart.clone(),
            bounds,
        })
    }

    /// `[-r, r]` in every coordinate.
    pub fn symmetric(chart: &Chart, radius: Rational) -> Result<Self> {
        Self::new(chart, vec![(-radius.clone(), radius); chart.dim()])
    }

    /// `[-1, 1]` in every coordinate.
    pub fn unit(chart: &Chart) -> Self {
        Self::symmetric(chart, Rational::one()).expect("nonempty interval")
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn bounds(&self) -> &[(Rational, Rational)] {
        &self.bounds
    }
}

/// Polynomial density on a box. Positivity is not required.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDensity {
    pub f: Polynomial,
    pub domain: IntegrationBox,
}

impl BoxDensity {
    pub fn new(f: Polynomial, domain: IntegrationBox) -> Result<Self> {
        domain.chart().ensure_same(f.chart())?;
        Ok(Self { f, domain })
    }

    /// Density on `[-1, 1]^dim`.
    pub fn on_unit_box(f: Polynomial) -> Self {
        let domain = IntegrationBox::unit(f.chart());
        Self { f, domain }
    }
}

/// `F_a(f) = integral of f a`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFunctional {
    pub kernel: Polynomial,
}

impl LinearFunctional {
    pub fn new(kernel: Polynomial) -> Self {
        Self { kernel }
    }

    pub fn evaluate(&self, f: &BoxDensity) -> Result<Rational> {
        integrate_box(&(self.kernel.try_mul(&f.f)?), &f.domain)
    }
}

/// Exact integral of a polynomial over a box.
pub fn integrate_box(p: &Polynomial, domain: &IntegrationBox) -> Result<Rational> {
    domain.chart().ensure_same(p.chart())?;
    let mut total = Rational::zero();
    for (exps, coeff) in p.terms() {
        let mut term = coeff.clone();
        for (e, (lo, hi)) in exps.iter().zip(domain.bounds()) {
            let k = *e as i32 + 1;
            term *= (num_traits::pow(hi.clone(), k as usize) - num_traits::pow(lo.clone(), k as usize))
                / integer(k as i64);
        }
        total += term;
    }
    Ok(total)
}

fn require_three(ps: &PhaseSpace) -> Result<()> {
    if ps.n() != 3 {
        return Err(Error::WrongChartSize {
            expected: 6,
            found: 2 * ps.n(),
        });
    }
    Ok(())
}

/// `(B_23, B_31, B_12)` as phase-space functions.
pub fn field_vector(ps: &PhaseSpace) -> Result<[Polynomial; 3]> {
    require_three(ps)?;
    let b = ps.magnetic_field();
    let get = |i: usize, j: usize| b.coefficient(&[i, j]).embed(ps.chart());
    Ok([get(1, 2)?, get(2, 0)?, get(0, 1)?])
}

fn velocity_gradient(a: &Polynomial) -> [Polynomial; 3] {
    [0, 1, 2].map(|i| a.partial_index(3 + i))
}

fn cross(u: &[Polynomial; 3], v: &[Polynomial; 3]) -> [Polynomial; 3] {
    [
        &(&u[1] * &v[2]) - &(&u[2] * &v[1]),
        &(&u[2] * &v[0]) - &(&u[0] * &v[2]),
        &(&u[0] * &v[1]) - &(&u[1] * &v[0]),
    ]
}

fn dot(u: &[Polynomial; 3], v: &[Polynomial; 3]) -> Polynomial {
    &(&(&u[0] * &v[0]) + &(&u[1] * &v[1])) + &(&u[2] * &v[2])
}

/// `{a, b}_CAN` on `(x, p)`.
pub fn canonical_bracket(ps: &PhaseSpace, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
    ps.chart().ensure_same(a.chart())?;
    ps.chart().ensure_same(b.chart())?;
    let n = ps.n();
    Ok((0..n).fold(Polynomial::zero(ps.chart()), |acc, i| {
        let t = &(&a.partial_index(i) * &b.partial_index(n + i))
            - &(&a.partial_index(n + i) * &b.partial_index(i));
        &acc + &t
    }))
}

/// Kernel of `{F_a, F_b}`: `{a, b}_CAN + B . (a_v x b_v)`. It is checked
/// against the bracket of the phase space.
pub fn lifted_kernel(ps: &PhaseSpace, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
    let b_vec = field_vector(ps)?;
    let can = canonical_bracket(ps, a, b)?;
    let magnetic = dot(&b_vec, &cross(&velocity_gradient(a), &velocity_gradient(b)));
    let kernel = &can + &magnetic;
    let reduced = ps.bracket(a, b)?;
    if kernel != reduced {
        return Err(Error::ReductionMismatch(format!(
            "kernel `{kernel}` vs bracket `{reduced}`"
        )));
    }
    Ok(kernel)
}

/// `{F_a, F_b}(f)`.
pub fn lifted_bracket(
    ps: &PhaseSpace,
    a: &LinearFunctional,
    b: &LinearFunctional,
    f: &BoxDensity,
) -> Result<Rational> {
    ps.chart().ensure_same(f.f.chart())?;
    let kernel = lifted_kernel(ps, &a.kernel, &b.kernel)?;
    let lhs = integrate_box(&(&f.f * &kernel), &f.domain)?;
    let rhs = integrate_box(&(&f.f * &ps.bracket(&a.kernel, &b.kernel)?), &f.domain)?;
    if lhs != rhs {
        return Err(Error::ReductionMismatch(format!("{lhs} vs {rhs}")));
    }
    Ok(lhs)
}

/// Both sides of the density-space jacobiator identity.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedJacobiator {
    /// `{{F_a,F_b},F_c}(f) + cyc`, through kernels of nested brackets.
    pub lhs: Rational,
    /// `integral of f (div B) c_v . (a_v x b_v)`.
    pub rhs: Rational,
}

impl LiftedJacobiator {
    pub fn passed(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn report(&self) -> Report {
        Report::new(
            "vlasov-jacobiator",
            self.passed(),
            crate::poly::fmt_rational(&self.lhs),
            crate::poly::fmt_rational(&self.rhs),
        )
        .with_meta("comparison", "exact")
    }
}

pub fn lifted_jacobiator(
    ps: &PhaseSpace,
    a: &LinearFunctional,
    b: &LinearFunctional,
    c: &LinearFunctional,
    f: &BoxDensity,
) -> Result<LiftedJacobiator> {
    ps.chart().ensure_same(f.f.chart())?;
    let k = |x: &Polynomial, y: &Polynomial| lifted_kernel(ps, x, y);
    let (a, b, c) = (&a.kernel, &b.kernel, &c.kernel);
    let nested = &(&k(&k(a, b)?, c)? + &k(&k(b, c)?, a)?) + &k(&k(c, a)?, b)?;
    let lhs = integrate_box(&(&f.f * &nested), &f.domain)?;
    let div = divergence_of_2form(ps.magnetic_field())?.embed(ps.chart())?;
    let triple = dot(
        &velocity_gradient(c),
        &cross(&velocity_gradient(a), &velocity_gradient(b)),
    );
    let rhs = integrate_box(&(&(&f.f * &div) * &triple), &f.domain)?;
    Ok(LiftedJacobiator { lhs, rhs })
}

/// Coadjoint action of `a` on a density: `-H_a(f)`.
pub fn coadjoint_apply(ps: &PhaseSpace, a: &LinearFunctional, f: &BoxDensity) -> Result<BoxDensity> {
    ps.chart().ensure_same(f.f.chart())?;
    let moved = -apply_vf(&ps.ham_vf(&a.kernel)?, &f.f)?;
    Ok(BoxDensity {
        f: moved,
        domain: f.domain.clone(),
    })
}

/// Intermediate objects of `sharp(phi(H_a, H_b, .))` applied to `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// `phi(H_a, H_b, .)`.
    pub contraction: DifferentialForm,
    /// `sharp(pi, phi(H_a, H_b, .))`.
    pub field: VectorField,
    pub value: Polynomial,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} -> {}", self.contraction, self.field, self.value)
    }
}

/// The obstruction function: a nonzero value for some `f` with no
/// corresponding hamiltonian shows the distribution is not integrable.
pub fn nonintegrability_witness(
    ps: &PhaseSpace,
    a: &LinearFunctional,
    b: &LinearFunctional,
    f: &Polynomial,
) -> Result<Witness> {
    ps.chart().ensure_same(f.chart())?;
    let ha = ps.ham_vf(&a.kernel)?;
    let hb = ps.ham_vf(&b.kernel)?;
    let contraction = contract(&contract(ps.phi(), &ha)?, &hb)?;
    let field = sharp(ps.pi(), &contraction)?;
    let value = apply_vf(&field, f)?;
    Ok(Witness {
        contraction,
        field,
        value,
    })
}
