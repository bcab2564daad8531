//! The counterexample chain, run end to end.
//!
//! Functions on the phase space `M` form an almost Lie algebra under the
//! magnetic bracket; densities on `M` are its dual and carry the lifted
//! bracket of [`crate::vlasov`], the infinite-dimensional analogue of the
//! structure built by [`crate::liealg::lie_poisson`]. A linear functional
//! `F_a` is the algebra element `a`, and since the Liouville volume is
//! invariant ([`crate::magnetic::PhaseSpace::liouville_check`]) the
//! hamiltonian vector field of `F_a` at a density `f` is the coadjoint
//! action `-H_a f` ([`crate::vlasov::coadjoint_apply`]).
//!
//! If the lifted structure were twisted Poisson, its hamiltonian
//! distribution would be integrable, so the commutator defect
//! `sharp(phi(H_a, H_b, .)) f` of two such fields would again be of the
//! form `H_c f = -H_f c`. Every function of that form integrates to zero
//! around closed orbits of `H_f` ([`crate::flows`]). The chain therefore:
//!
//! 1. builds `T*R^3` with the example field ([`crate::magnetic::make_phase_space`]);
//! 2. checks the twisted condition and the anchors for `pi_B`, `[pi_B, pi_B]`, `phi`;
//! 3. checks the hamiltonian vector fields of `f = x1 p2 - x2 p1`, `p3`, `p1`;
//! 4. checks Liouville invariance under `H_f`;
//! 5. computes the witness for `a = p3`, `b = p1` applied to `f`
//!    ([`crate::vlasov::nonintegrability_witness`]) and requires it nonzero;
//! 6. finds the period of the orbit of `H_f` through `(1,0,0,0,0,0)` and
//!    integrates the witness around it ([`crate::flows::orbit_line_integral`]);
//!    a nonzero value means the witness is not of the form `H_c f`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::exterior::{schouten_square, DifferentialForm};
use crate::flows::{detect_period, orbit_line_integral, DEFAULT_MAX_TIME, DEFAULT_STEP, DEFAULT_TOL};
use crate::magnetic::{example_magnetic_field, make_phase_space, CONTRACTION_SIGN};
use crate::parse::{parse_form, parse_multivector, parse_polynomial};
use crate::poly::Chart;
use crate::report::Report;
use crate::vlasov::{nonintegrability_witness, LinearFunctional};

pub const VERDICT: &str = "NOT twisted Poisson on density space";
pub const ORBIT_START: [f64; 6] = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
pub const PERIOD_TOL: f64 = 1e-6;
pub const INTEGRAL_TOL: f64 = 1e-6;

/// Expected values, pretty-printed.
#[derive(Debug, Clone, PartialEq)]
pub struct Anchors {
    pub values: BTreeMap<&'static str, String>,
}

pub const ANCHOR_KEYS: [&str; 13] = [
    "pi",
    "schouten",
    "phi",
    "ham_f",
    "ham_p3",
    "ham_p1",
    "lie_omega",
    "omega2_wedge_lie",
    "contraction",
    "sharp",
    "witness",
    "period",
    "orbit_integral",
];

fn canonical_form_str(src: &str) -> String {
    parse_form(&Chart::phase_space(3), src).expect("anchor form").to_string()
}

fn canonical_multivector_str(src: &str) -> String {
    parse_multivector(&Chart::phase_space(3), src).expect("anchor multivector").to_string()
}

fn canonical_poly_str(src: &str) -> String {
    parse_polynomial(&Chart::phase_space(3), src).expect("anchor polynomial").to_string()
}

fn with_sign(src: &str, sign: i32) -> String {
    if sign < 0 {
        format!("-({src})")
    } else {
        src.to_string()
    }
}

impl Anchors {
    /// The example's displayed values, written in display order and
    /// reprinted canonically. The three chain values carry
    /// [`CONTRACTION_SIGN`].
    pub fn example() -> Self {
        let mut values = BTreeMap::new();
        values.insert(
            "pi",
            canonical_multivector_str(
                "@x1^@p1 + @x2^@p2 + @x3^@p3 + x2^2*@p2^@p3 + x1*x2*@p1^@p3",
            ),
        );
        values.insert("schouten", canonical_multivector_str("2*x1*@p1^@p2^@p3"));
        values.insert("phi", canonical_form_str("-x1*dx1^dx2^dx3"));
        values.insert(
            "ham_f",
            canonical_multivector_str("x1*@x2 - x2*@x1 + p1*@p2 - p2*@p1"),
        );
        values.insert("ham_p3", canonical_multivector_str("@x3 + x2^2*@p2 + x1*x2*@p1"));
        values.insert("ham_p1", canonical_multivector_str("@x1 - x1*x2*@p3"));
        values.insert("lie_omega", canonical_form_str("x1^2*dx1^dx3 + x1*x2*dx2^dx3"));
        values.insert("omega2_wedge_lie", "0".to_string());
        values.insert(
            "contraction",
            canonical_form_str(&with_sign("x1*dx2", CONTRACTION_SIGN)),
        );
        values.insert(
            "sharp",
            canonical_multivector_str(&with_sign("x1*@p2", CONTRACTION_SIGN)),
        );
        values.insert("witness", canonical_poly_str(&with_sign("x1^2", CONTRACTION_SIGN)));
        values.insert("period", format!("{}", 2.0 * PI));
        values.insert("orbit_integral", format!("{}", PI));
        Self { values }
    }

    pub fn get(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    /// Replaces one anchor; unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let k = ANCHOR_KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown anchor `{key}`; expected one of {}",
                    ANCHOR_KEYS.join(", ")
                ))
            })?;
        if matches!(key, "period" | "orbit_integral") {
            value.trim().parse::<f64>().map_err(|_| {
                Error::InvalidParameter(format!("anchor `{key}` needs a number, got `{value}`"))
            })?;
        }
        self.values.insert(k, value.trim().to_string());
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    PhaseSpace,
    Twisted,
    Schouten,
    Phi,
    Hamiltonians,
    Liouville,
    Witness,
    Period,
    OrbitIntegral,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::PhaseSpace => "phase-space",
            Stage::Twisted => "twisted",
            Stage::Schouten => "schouten",
            Stage::Phi => "phi",
            Stage::Hamiltonians => "hamiltonians",
            Stage::Liouville => "liouville",
            Stage::Witness => "witness",
            Stage::Period => "period",
            Stage::OrbitIntegral => "orbit-integral",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One executed stage with its intermediate objects.
#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    pub stage: Stage,
    pub pass: bool,
    pub objects: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageFailure {
    pub stage: Stage,
    pub message: String,
}

impl fmt::Display for StageFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage `{}` failed: {}", self.stage, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reproduction {
    pub stages: Vec<StageRecord>,
    pub failure: Option<StageFailure>,
    pub orbit_integral: Option<f64>,
    pub error_estimate: Option<f64>,
    pub period: Option<f64>,
}

impl Reproduction {
    pub fn verdict(&self) -> bool {
        self.failure.is_none()
    }

    pub fn report(&self) -> Report {
        let lhs = match &self.failure {
            None => VERDICT.to_string(),
            Some(f) => f.to_string(),
        };
        let mut stages = serde_json::Map::new();
        for rec in &self.stages {
            let objects: serde_json::Map<String, Value> = rec
                .objects
                .iter()
                .map(|(k, v)| (k.clone(), Value::from(v.clone())))
                .collect();
            stages.insert(
                rec.stage.name().to_string(),
                serde_json::json!({ "pass": rec.pass, "objects": objects }),
            );
        }
        let mut report = Report::new("reproduce-paper", self.verdict(), lhs, VERDICT)
            .with_meta("stages", Value::Object(stages))
            .with_meta("contraction_sign", CONTRACTION_SIGN)
            .with_meta("period_tol", PERIOD_TOL)
            .with_meta("integral_tol", INTEGRAL_TOL);
        if let Some(stage) = self.failure.as_ref().map(|f| f.stage.name()) {
            report = report.with_meta("failed_stage", stage);
        }
        if let Some(v) = self.orbit_integral {
            report = report.with_meta("orbit_integral", v);
        }
        if let Some(v) = self.error_estimate {
            report = report.with_meta("error_estimate", v);
        }
        report
    }
}

impl fmt::Display for Reproduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rec in &self.stages {
            writeln!(f, "[{}] {}", if rec.pass { "ok" } else { "FAIL" }, rec.stage)?;
            for (k, v) in &rec.objects {
                writeln!(f, "    {k} = {v}")?;
            }
        }
        match &self.failure {
            None => write!(f, "verdict: {VERDICT}"),
            Some(fail) => write!(f, "aborted: {fail}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReproduceOptions {
    /// Magnetic field on `x1..x3`.
    pub field: DifferentialForm,
    /// Symbolic and numeric anchors; `None` checks only structural facts.
    pub anchors: Option<Anchors>,
    pub step: f64,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        Self {
            field: example_magnetic_field(),
            anchors: Some(Anchors::example()),
            step: DEFAULT_STEP,
        }
    }
}

struct Run {
    anchors: Option<Anchors>,
    stages: Vec<StageRecord>,
}

impl Run {
    fn record(&mut self, stage: Stage, objects: Vec<(&str, String)>) {
        self.stages.push(StageRecord {
            stage,
            pass: true,
            objects: objects.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        });
    }

    fn fail(&mut self, stage: Stage, message: String) -> StageFailure {
        if let Some(last) = self.stages.last_mut().filter(|r| r.stage == stage) {
            last.pass = false;
        } else {
            self.stages.push(StageRecord {
                stage,
                pass: false,
                objects: Vec::new(),
            });
        }
        StageFailure { stage, message }
    }

    /// Compares printed objects with their anchors.
    fn expect(&mut self, stage: Stage, found: &[(&str, String)]) -> std::result::Result<(), StageFailure> {
        self.record(stage, found.to_vec());
        let Some(anchors) = &self.anchors else {
            return Ok(());
        };
        for (key, value) in found {
            let Some(want) = anchors.values.get(key) else {
                continue;
            };
            if want != value {
                let msg = format!("{key}: expected `{want}`, found `{value}`");
                return Err(self.fail(stage, msg));
            }
        }
        Ok(())
    }

    fn numeric_anchor(&self, key: &str) -> Option<f64> {
        self.anchors.as_ref().and_then(|a| a.get(key).parse().ok())
    }
}

/// Runs the chain with the example field and anchors.
pub fn reproduce_counterexample() -> Reproduction {
    reproduce_with(&ReproduceOptions::default())
}

pub fn reproduce_with(opts: &ReproduceOptions) -> Reproduction {
    let mut run = Run {
        anchors: opts.anchors.clone(),
        stages: Vec::new(),
    };
    let mut out = Reproduction {
        stages: Vec::new(),
        failure: None,
        orbit_integral: None,
        error_estimate: None,
        period: None,
    };
    let result = chain(&mut run, opts, &mut out);
    out.stages = run.stages;
    out.failure = result.err();
    out
}

fn chain(
    run: &mut Run,
    opts: &ReproduceOptions,
    out: &mut Reproduction,
) -> std::result::Result<(), StageFailure> {
    let ps = make_phase_space(3, &opts.field)
        .map_err(|e| run.fail(Stage::PhaseSpace, e.to_string()))?;
    run.expect(
        Stage::PhaseSpace,
        &[("omega", ps.omega().to_string()), ("pi", ps.pi().to_string())],
    )?;

    let twisted = ps.check_twisted();
    run.record(
        Stage::Twisted,
        vec![("lhs", twisted.lhs.to_string()), ("rhs", twisted.rhs.to_string())],
    );
    if !twisted.passed() {
        return Err(run.fail(Stage::Twisted, "[pi, pi] differs from 2 sharp^3(phi)".into()));
    }

    let schouten = schouten_square(ps.pi()).map_err(|e| run.fail(Stage::Schouten, e.to_string()))?;
    run.expect(Stage::Schouten, &[("schouten", schouten.to_string())])?;
    run.expect(Stage::Phi, &[("phi", ps.phi().to_string())])?;

    let poly = |s: &str| parse_polynomial(ps.chart(), s).expect("fixed expression");
    let f = poly("x1*p2 - x2*p1");
    let (a, b) = (poly("p3"), poly("p1"));
    let hams = [(&f, "ham_f"), (&a, "ham_p3"), (&b, "ham_p1")]
        .iter()
        .map(|(p, k)| ps.ham_vf(p).map(|h| (*k, h.to_string())))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| run.fail(Stage::Hamiltonians, e.to_string()))?;
    run.expect(Stage::Hamiltonians, &hams)?;

    let liouville = ps.liouville_check(&f).map_err(|e| run.fail(Stage::Liouville, e.to_string()))?;
    run.expect(
        Stage::Liouville,
        &[
            ("lie_omega", liouville.lie_omega.to_string()),
            ("omega2_wedge_lie", liouville.lower_power_wedge.to_string()),
        ],
    )?;
    if let Some(r) = run.stages.last_mut() {
        r.objects.push(("lie_volume".into(), liouville.lie_volume.to_string()));
    }
    if !liouville.passed() {
        return Err(run.fail(Stage::Liouville, format!("L_H omega^n = {}", liouville.lie_volume)));
    }

    let witness = nonintegrability_witness(
        &ps,
        &LinearFunctional::new(a.clone()),
        &LinearFunctional::new(b.clone()),
        &f,
    )
    .map_err(|e| run.fail(Stage::Witness, e.to_string()))?;
    run.expect(
        Stage::Witness,
        &[
            ("contraction", witness.contraction.to_string()),
            ("sharp", witness.field.to_string()),
            ("witness", witness.value.to_string()),
        ],
    )?;
    if witness.value.is_zero() {
        return Err(run.fail(
            Stage::Witness,
            "obstruction vanishes identically; no counterexample for this field".into(),
        ));
    }

    let hf = ps.ham_vf(&f).map_err(|e| run.fail(Stage::Period, e.to_string()))?;
    let period = detect_period(&hf, &ORBIT_START, opts.step, DEFAULT_MAX_TIME, DEFAULT_TOL)
        .map_err(|e| run.fail(Stage::Period, e.to_string()))?
        .ok_or_else(|| run.fail(Stage::Period, "orbit of H_f does not close".into()))?;
    out.period = Some(period);
    run.record(Stage::Period, vec![("period", format!("{period}"))]);
    if let Some(want) = run.numeric_anchor("period") {
        if (period - want).abs() >= PERIOD_TOL {
            return Err(run.fail(Stage::Period, format!("expected {want}, found {period}")));
        }
    }

    let integral = orbit_line_integral(&witness.value, &hf, &ORBIT_START, opts.step)
        .map_err(|e| run.fail(Stage::OrbitIntegral, e.to_string()))?;
    out.orbit_integral = Some(integral.value);
    out.error_estimate = Some(integral.error_estimate);
    run.record(
        Stage::OrbitIntegral,
        vec![
            ("orbit_integral", format!("{}", integral.value)),
            ("error_estimate", format!("{:e}", integral.error_estimate)),
        ],
    );
    if let Some(want) = run.numeric_anchor("orbit_integral") {
        if (integral.value.abs() - want).abs() >= INTEGRAL_TOL {
            return Err(run.fail(
                Stage::OrbitIntegral,
                format!("expected |value| = {want}, found {}", integral.value),
            ));
        }
    }
    if integral.value.abs() <= 10.0 * integral.error_estimate {
        return Err(run.fail(
            Stage::OrbitIntegral,
            "orbit integral is zero within the error estimate".into(),
        ));
    }
    Ok(())
}

/// Parses a magnetic 2-form on `x1..x3`.
pub fn field_from_str(src: &str) -> Result<DifferentialForm> {
    crate::parse::parse_form_of_degree(&Chart::configuration(3), src, 2)
}
