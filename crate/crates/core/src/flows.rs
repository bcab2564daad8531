//! Fixed-step RK4 integration of polynomial vector fields, first-return
//! detection and line integrals of functions along closed orbits.

use crate::error::{Error, Result};
use crate::exterior::VectorField;
use crate::poly::Polynomial;

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_MAX_TIME: f64 = 100.0;
pub const DEFAULT_TOL: f64 = 1e-8;

/// Polynomial compiled to `f64` monomial lists.
#[derive(Debug, Clone)]
pub struct CompiledPolynomial {
    dim: usize,
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPolynomial {
    pub fn new(p: &Polynomial) -> Self {
        let terms = p
            .terms()
            .map(|(exps, c)| {
                let c = num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN);
                let powers = exps
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e as i32))
                    .collect();
                (c, powers)
            })
            .collect();
        Self {
            dim: p.chart().dim(),
            terms,
        }
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.dim);
        self.terms
            .iter()
            .map(|(c, powers)| powers.iter().fold(*c, |acc, &(i, e)| acc * y[i].powi(e)))
            .sum()
    }
}

/// Vector field compiled component by component.
#[derive(Debug, Clone)]
pub struct CompiledField {
    components: Vec<CompiledPolynomial>,
}

impl CompiledField {
    pub fn new(x: &VectorField) -> Result<Self> {
        Ok(Self {
            components: x.components()?.iter().map(CompiledPolynomial::new).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn eval(&self, y: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(y)).collect()
    }

    fn check_start(&self, start: &[f64]) -> Result<()> {
        if start.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: start.len(),
            });
        }
        if start.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { time: 0.0 });
        }
        Ok(())
    }

    /// Increment of one classical RK4 step.
    fn increment(&self, y: &[f64], h: f64) -> Vec<f64> {
        let shifted = |k: &[f64], s: f64| -> Vec<f64> {
            y.iter().zip(k).map(|(a, b)| a + s * b).collect()
        };
        let k1 = self.eval(y);
        let k2 = self.eval(&shifted(&k1, h / 2.0));
        let k3 = self.eval(&shifted(&k2, h / 2.0));
        let k4 = self.eval(&shifted(&k3, h));
        (0..y.len())
            .map(|i| h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect()
    }

    fn substep(&self, y: &[f64], h: f64) -> Vec<f64> {
        y.iter().zip(self.increment(y, h)).map(|(a, b)| a + b).collect()
    }
}

/// RK4 state with compensated summation of the increments.
struct Stepper<'a> {
    field: &'a CompiledField,
    h: f64,
    y: Vec<f64>,
    carry: Vec<f64>,
    k: usize,
}

impl<'a> Stepper<'a> {
    fn new(field: &'a CompiledField, start: &[f64], h: f64) -> Self {
        Self {
            field,
            h,
            y: start.to_vec(),
            carry: vec![0.0; start.len()],
            k: 0,
        }
    }

    fn time(&self) -> f64 {
        self.k as f64 * self.h
    }

    fn advance(&mut self) -> Result<()> {
        let inc = self.field.increment(&self.y, self.h);
        for ((y, c), d) in self.y.iter_mut().zip(&mut self.carry).zip(inc) {
            let corrected = d - *c;
            let next = *y + corrected;
            *c = (next - *y) - corrected;
            *y = next;
        }
        self.k += 1;
        if self.y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { time: self.time() });
        }
        Ok(())
    }
}

fn check_step(step: f64) -> Result<()> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {step}")));
    }
    Ok(())
}

/// Samples `t_k = k * step`, `k = 0..=n_steps`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub field: VectorField,
    pub step: f64,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn names(&self) -> &[String] {
        self.field.chart().names()
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("nonempty trajectory")
    }
}

pub fn rk4_integrate(x: &VectorField, start: &[f64], step: f64, n_steps: usize) -> Result<Trajectory> {
    check_step(step)?;
    if n_steps == 0 {
        return Err(Error::InvalidParameter("n_steps must be at least 1".into()));
    }
    let field = CompiledField::new(x)?;
    field.check_start(start)?;
    let mut stepper = Stepper::new(&field, start, step);
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    states.push(start.to_vec());
    for _ in 0..n_steps {
        stepper.advance()?;
        times.push(stepper.time());
        states.push(stepper.y.clone());
    }
    Ok(Trajectory {
        field: x.clone(),
        step,
        times,
        states,
    })
}

/// Parameters of first-return detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodOptions {
    pub step: f64,
    pub max_time: f64,
    pub tol: f64,
}

impl Default for PeriodOptions {
    fn default() -> Self {
        Self {
            step: DEFAULT_STEP,
            max_time: DEFAULT_MAX_TIME,
            tol: DEFAULT_TOL,
        }
    }
}

fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `(y - y0) . X(y)`, half the derivative of the squared distance.
fn approach_rate(field: &CompiledField, y: &[f64], y0: &[f64]) -> f64 {
    field.eval(y).iter().zip(y).zip(y0).map(|((v, a), b)| v * (a - b)).sum()
}

/// First time the orbit comes back within `tol` (max-norm) of `start`
/// after leaving the ball of radius `10 tol`. The return is located as the
/// closest approach inside a step, by bisection on the approach rate.
pub fn detect_period(
    x: &VectorField,
    start: &[f64],
    step: f64,
    max_time: f64,
    tol: f64,
) -> Result<Option<f64>> {
    check_step(step)?;
    if tol.is_nan() || tol <= 0.0 || max_time.is_nan() || max_time <= 0.0 {
        return Err(Error::InvalidParameter("tol and max_time must be positive".into()));
    }
    let field = CompiledField::new(x)?;
    field.check_start(start)?;
    let mut stepper = Stepper::new(&field, start, step);
    let mut left = false;
    let mut rate = approach_rate(&field, start, start);
    while stepper.time() < max_time {
        let prev = stepper.y.clone();
        let t_prev = stepper.time();
        stepper.advance()?;
        let next_rate = approach_rate(&field, &stepper.y, start);
        if !left {
            left = max_dist(&stepper.y, start) > 10.0 * tol;
        } else if rate < 0.0 && next_rate >= 0.0 {
            let (mut lo, mut hi) = (0.0, step);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if approach_rate(&field, &field.substep(&prev, mid), start) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let s = 0.5 * (lo + hi);
            let t = t_prev + s;
            if t <= max_time && max_dist(&field.substep(&prev, s), start) <= tol {
                return Ok(Some(t));
            }
        }
        rate = next_rate;
    }
    Ok(None)
}

/// Value of an orbit integral, with the step-halving comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitIntegral {
    pub value: f64,
    pub period: f64,
    pub step: f64,
    /// Number of Simpson intervals over one period.
    pub intervals: usize,
    /// The same pipeline run at half the step.
    pub refined: f64,
    /// `|value - refined|` plus a rounding floor `eps * intervals * int |g|`.
    pub error_estimate: f64,
}

/// Composite Simpson over `[0, T]` on the RK4 trajectory with `N` even
/// intervals, `N = 2 ceil(T / 2h)`.
fn simpson_on_orbit(
    g: &CompiledPolynomial,
    x: &VectorField,
    start: &[f64],
    period: f64,
    step: f64,
) -> Result<(f64, f64, usize)> {
    let n = 2 * ((period / (2.0 * step)).ceil() as usize).max(1);
    let h = period / n as f64;
    let traj = rk4_integrate(x, start, h, n)?;
    let values: Vec<f64> = traj.states.iter().map(|y| g.eval(y)).collect();
    let weight = |k: usize| {
        if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let sum: f64 = values.iter().enumerate().map(|(k, v)| weight(k) * v).sum();
    let abs: f64 = values.iter().enumerate().map(|(k, v)| weight(k) * v.abs()).sum();
    Ok((sum * h / 3.0, abs * h / 3.0, n))
}

fn integral_at(
    g: &CompiledPolynomial,
    x: &VectorField,
    start: &[f64],
    opts: &PeriodOptions,
) -> Result<(f64, f64, f64, usize)> {
    let period = detect_period(x, start, opts.step, opts.max_time, opts.tol)?.ok_or(
        Error::NoPeriod {
            max_time: opts.max_time,
        },
    )?;
    let (value, abs, n) = simpson_on_orbit(g, x, start, period, opts.step)?;
    Ok((value, abs, period, n))
}

pub fn orbit_line_integral_with(
    g: &Polynomial,
    x: &VectorField,
    start: &[f64],
    opts: &PeriodOptions,
) -> Result<OrbitIntegral> {
    x.chart().ensure_same(g.chart())?;
    let compiled = CompiledPolynomial::new(g);
    let (value, abs, period, intervals) = integral_at(&compiled, x, start, opts)?;
    let half = PeriodOptions {
        step: opts.step / 2.0,
        ..*opts
    };
    let (refined, _, _, _) = integral_at(&compiled, x, start, &half)?;
    let floor = f64::EPSILON * intervals as f64 * abs;
    Ok(OrbitIntegral {
        value,
        period,
        step: opts.step,
        intervals,
        refined,
        error_estimate: (value - refined).abs() + floor,
    })
}

/// `int_0^T g(gamma(t)) dt` over the first closed orbit through `start`.
pub fn orbit_line_integral(
    g: &Polynomial,
    x: &VectorField,
    start: &[f64],
    step: f64,
) -> Result<OrbitIntegral> {
    orbit_line_integral_with(
        g,
        x,
        start,
        &PeriodOptions {
            step,
            ..PeriodOptions::default()
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::apply_vf;
    use crate::magnetic::PhaseSpace;
    use crate::parse::{parse_multivector, parse_polynomial};
    use crate::poly::Chart;
    use std::f64::consts::PI;

    fn rotation() -> (PhaseSpace, VectorField) {
        let ps = PhaseSpace::example();
        let f = parse_polynomial(ps.chart(), "x1*p2 - x2*p1").unwrap();
        let h = ps.ham_vf(&f).unwrap();
        (ps, h)
    }

    #[test]
    fn constant_and_zero_fields() {
        let c = Chart::configuration(2);
        let zero = VectorField::zero(&c, 1);
        let t = rk4_integrate(&zero, &[0.5, -2.0], 0.1, 5).unwrap();
        assert!(t.states.iter().all(|s| s == &vec![0.5, -2.0]));
        let dx1 = parse_multivector(&Chart::configuration(1), "@x1").unwrap();
        let t = rk4_integrate(&dx1, &[0.0], 0.1, 10).unwrap();
        assert_eq!(t.last(), &[1.0]);
        assert_eq!(t.times[10], 1.0);
    }

    #[test]
    fn integration_errors() {
        let dx1 = parse_multivector(&Chart::configuration(1), "@x1").unwrap();
        assert!(matches!(
            rk4_integrate(&dx1, &[0.0, 1.0], 0.1, 3),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        ));
        assert!(matches!(rk4_integrate(&dx1, &[0.0], -0.1, 3), Err(Error::InvalidParameter(_))));
        let blowup = parse_multivector(&Chart::configuration(1), "x1^2*@x1").unwrap();
        assert!(matches!(rk4_integrate(&blowup, &[1.0], 0.1, 200), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn rotation_orbit_stays_on_circle() {
        let (_, h) = rotation();
        let t = rk4_integrate(&h, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1e-3, 7000).unwrap();
        for s in &t.states {
            assert_eq!((s[2], s[5]), (0.0, 0.0));
            assert!((s[0].hypot(s[1]) - 1.0).abs() < 1e-11);
        }
        // oracle: exact rotation at unit speed
        let (tk, sk) = (t.times[5000], &t.states[5000]);
        assert!((sk[0] - tk.cos()).abs() < 1e-11 && (sk[1] - tk.sin()).abs() < 1e-11);
    }

    #[test]
    fn period_examples() {
        let (_, h) = rotation();
        let start = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let t = detect_period(&h, &start, 1e-3, 100.0, 1e-8).unwrap().unwrap();
        assert!((t - 2.0 * PI).abs() < 1e-6);
        let dx1 = parse_multivector(&Chart::configuration(2), "@x1").unwrap();
        assert_eq!(detect_period(&dx1, &[0.0, 0.0], 1e-2, 20.0, 1e-8).unwrap(), None);
        let circle = parse_multivector(&Chart::configuration(2), "-x2*@x1 + x1*@x2").unwrap();
        let t2 = detect_period(&circle, &[2.0, 0.0], 1e-3, 100.0, 1e-8).unwrap().unwrap();
        assert!((t2 - 2.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn orbit_integral_examples() {
        let (ps, h) = rotation();
        let g = parse_polynomial(ps.chart(), "x1^2").unwrap();
        let unit = orbit_line_integral(&g, &h, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1e-3).unwrap();
        assert!((unit.value - PI).abs() < 1e-6);
        assert!(unit.error_estimate >= 0.0 && unit.error_estimate < 1e-9);
        let big = orbit_line_integral(&g, &h, &[2.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1e-3).unwrap();
        assert!((big.value - 4.0 * PI).abs() < 1e-5);
        let x1 = parse_polynomial(ps.chart(), "x1").unwrap();
        let dh = apply_vf(&h, &x1).unwrap();
        let lemma = orbit_line_integral(&dh, &h, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1e-3).unwrap();
        assert!(lemma.value.abs() < 1e-6);
        assert!(lemma.value.abs() <= 10.0 * lemma.error_estimate);
    }

    #[test]
    fn orbit_integral_converges_at_fourth_order() {
        let (ps, h) = rotation();
        let g = parse_polynomial(ps.chart(), "x1^2").unwrap();
        let err = |step: f64| {
            let r = orbit_line_integral(&g, &h, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], step).unwrap();
            (r.value - PI).abs()
        };
        let ratio = err(0.01) / err(0.005);
        assert!(ratio >= 15.0, "ratio {ratio}");
    }

    #[test]
    fn no_period_is_an_error() {
        let dx1 = parse_multivector(&Chart::configuration(1), "@x1").unwrap();
        let g = parse_polynomial(&Chart::configuration(1), "x1").unwrap();
        let opts = PeriodOptions { step: 0.01, max_time: 5.0, tol: 1e-8 };
        assert_eq!(
            orbit_line_integral_with(&g, &dx1, &[0.0], &opts).unwrap_err(),
            Error::NoPeriod { max_time: 5.0 }
        );
    }
}
