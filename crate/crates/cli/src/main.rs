use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use twistkit::exterior::{d, schouten_square, DifferentialForm};
use twistkit::flows::{self, PeriodOptions};
use twistkit::liealg::{algebra_jacobi_defect, dual_jacobi_defect, lie_poisson, pair_linear, StructureConstants};
use twistkit::magnetic::{
    invert_two_form, make_phase_space, PhaseSpace, SIGMA_BRACKETS, SIGMA_JACOBI, SIGMA_SCHOUTEN,
};
use twistkit::parse::{parse_form, parse_form_of_degree, parse_multivector_of_degree, parse_polynomial};
use twistkit::poly::{Chart, Polynomial};
use twistkit::report::Report;
use twistkit::reproduce::{reproduce_with, Anchors, ReproduceOptions};
use twistkit::vlasov::{lifted_jacobiator, BoxDensity, IntegrationBox, LinearFunctional};
use twistkit::Error;

mod csv_out;

#[derive(Parser)]
#[command(name = "twistkit", version, about = "Exact checks for twisted Poisson structures")]
struct Cli {
    /// Print a single JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Space {
    /// Configuration dimension; the phase chart is x1..xn, p1..pn.
    #[arg(long, default_value_t = 3)]
    n: usize,

    /// Magnetic 2-form in the configuration coordinates.
    #[arg(long = "B", default_value = "0", allow_hyphen_values = true)]
    b: String,
}

#[derive(Args, Clone)]
struct ChartArg {
    /// Comma-separated coordinate names; defaults to the phase chart of `--n`.
    #[arg(long)]
    chart: Option<String>,

    #[arg(long, default_value_t = 3)]
    n: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Exterior derivative of a form.
    D {
        #[command(flatten)]
        chart: ChartArg,
        #[arg(long, allow_hyphen_values = true)]
        form: String,
    },
    /// Schouten square [pi, pi] of a bivector, by default of pi_B.
    Schouten {
        #[command(flatten)]
        space: Space,
        /// Bivector to square instead of pi_B (on the phase chart).
        #[arg(long, allow_hyphen_values = true)]
        pi: Option<String>,
    },
    /// Inverse bivector of a nondegenerate 2-form, by default of omega_B.
    Invert {
        #[command(flatten)]
        space: Space,
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<String>,
    },
    /// Bracket {f, g} = pi_B(df, dg).
    Bracket {
        #[command(flatten)]
        space: Space,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
    },
    /// Hamiltonian vector field H_f = {., f}.
    Hamiltonian {
        #[command(flatten)]
        space: Space,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
    /// Checks {{f,g},h} + cyc = sigma_J phi(H_f, H_g, H_h).
    Jacobiator {
        #[command(flatten)]
        space: Space,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
    },
    /// Checks [pi_B, pi_B] = 2 sharp^3(phi).
    CheckTwisted {
        #[command(flatten)]
        space: Space,
    },
    /// Checks invariance of omega_B^n under H_f.
    Liouville {
        #[command(flatten)]
        space: Space,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
    /// Linear bracket on the dual of an almost Lie algebra.
    LiePoisson {
        /// JSON table {"d": n, "c": [[k,i,j,value], ...]} (1-based), a path to
        /// one, or `so3`.
        #[arg(long)]
        constants: String,
        /// Check the Jacobi identity on all linear triples.
        #[arg(long)]
        jacobi: bool,
    },
    /// Both sides of the density-space jacobiator for linear functionals.
    VlasovJacobiator {
        #[command(flatten)]
        space: Space,
        /// Kernels of the three linear functionals.
        #[arg(long = "a", allow_hyphen_values = true)]
        ka: String,
        #[arg(long = "b", allow_hyphen_values = true)]
        kb: String,
        #[arg(long = "c", allow_hyphen_values = true)]
        kc: String,
        /// Density.
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        /// Half-width r of the box [-r, r]^6, a rational.
        #[arg(long, default_value = "1")]
        radius: String,
    },
    /// Integral of g around the closed orbit of H_f through a point.
    OrbitIntegral {
        #[arg(long = "B", default_value = "0", allow_hyphen_values = true)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        /// Start point, comma separated; its length fixes the chart.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        start: Vec<f64>,
        #[command(flatten)]
        numeric: Numeric,
        /// Fail unless the value is within `--within` of this number.
        #[arg(long, allow_hyphen_values = true)]
        expect: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        within: f64,
        /// Write the trajectory over one period as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Runs the full counterexample chain.
    ReproducePaper {
        /// Magnetic field; anything but the default disables the built-in anchors.
        #[arg(long = "B", allow_hyphen_values = true)]
        b: Option<String>,
        /// Override an anchor, e.g. `--anchor witness=x1^2`.
        #[arg(long = "anchor", value_name = "KEY=VALUE")]
        anchors: Vec<String>,
        #[arg(long)]
        step: Option<f64>,
    },
}

#[derive(Args, Clone)]
struct Numeric {
    /// Integration step; defaults to TWISTKIT_STEP or 1e-3.
    #[arg(long)]
    step: Option<f64>,
    #[arg(long, default_value_t = flows::DEFAULT_MAX_TIME)]
    max_time: f64,
    /// Return tolerance for period detection (max-norm).
    #[arg(long, default_value_t = flows::DEFAULT_TOL)]
    tol: f64,
}

/// Outcome of a subcommand: a report plus its text rendering.
struct Outcome {
    report: Report,
    text: String,
}

impl Outcome {
    fn value(check: &str, result: impl ToString) -> Self {
        let report = Report::value(check, result);
        let text = report.lhs.clone();
        Self { report, text }
    }

    fn check(report: Report) -> Self {
        let text = format!(
            "{} {}\n  lhs: {}\n  rhs: {}",
            if report.pass { "PASS" } else { "FAIL" },
            report.check,
            report.lhs,
            report.rhs
        );
        Self { report, text }
    }
}

/// Failure kinds mapped onto exit codes.
enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoPeriod { .. } | Error::NonFinite { .. } | Error::ReductionMismatch(_) => {
                Failure::Check(e.to_string())
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast::<Error>() {
            Ok(err) => err.into(),
            Err(e) => Failure::Usage(format!("{e:#}")),
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn default_step() -> Res<f64> {
    match std::env::var("TWISTKIT_STEP") {
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite() && *v > 0.0)
            .ok_or_else(|| Failure::Usage(format!("TWISTKIT_STEP must be a positive number, got `{s}`"))),
        Err(_) => Ok(flows::DEFAULT_STEP),
    }
}

fn phase_space(space: &Space) -> Res<PhaseSpace> {
    let chart = Chart::phase_space(space.n.max(1));
    if space.n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let b = parse_form_of_degree(&chart, &space.b, 2).map_err(|e| Failure::Usage(format!("--B: {e}")))?;
    Ok(make_phase_space(space.n, &b)?)
}

fn poly(chart: &Chart, flag: &str, src: &str) -> Res<Polynomial> {
    parse_polynomial(chart, src).map_err(|e| Failure::Usage(format!("--{flag}: {e}")))
}

fn chart_of(arg: &ChartArg) -> Res<Chart> {
    match &arg.chart {
        Some(names) => Ok(Chart::new(names.split(',').map(str::trim))?),
        None if arg.n == 0 => Err(Failure::Usage("--n must be at least 1".into())),
        None => Ok(Chart::phase_space(arg.n)),
    }
}

fn load_constants(src: &str) -> Res<StructureConstants> {
    if src == "so3" {
        return Ok(StructureConstants::so3());
    }
    let text = if src.trim_start().starts_with('{') {
        src.to_string()
    } else {
        std::fs::read_to_string(src)
            .with_context(|| format!("cannot read constants file `{src}`"))
            .map_err(Failure::from)?
    };
    Ok(StructureConstants::from_json(&text)?)
}

fn with_signs(report: Report) -> Report {
    report
        .with_meta("sigma_S", SIGMA_SCHOUTEN)
        .with_meta("sigma_J", SIGMA_JACOBI)
        .with_meta("sigma_5", SIGMA_BRACKETS)
}

fn execute(command: &Command) -> Res<Outcome> {
    match command {
        Command::D { chart, form } => {
            let c = chart_of(chart)?;
            let a = parse_form(&c, form).map_err(|e| Failure::Usage(format!("--form: {e}")))?;
            Ok(Outcome::value("d", d(&a)))
        }
        Command::Schouten { space, pi } => {
            let ps = phase_space(space)?;
            let bivector = match pi {
                Some(src) => parse_multivector_of_degree(ps.chart(), src, 2)
                    .map_err(|e| Failure::Usage(format!("--pi: {e}")))?,
                None => ps.pi().clone(),
            };
            Ok(Outcome::value("schouten", schouten_square(&bivector)?))
        }
        Command::Invert { space, omega } => {
            let ps = phase_space(space)?;
            let form: DifferentialForm = match omega {
                Some(src) => parse_form_of_degree(ps.chart(), src, 2)
                    .map_err(|e| Failure::Usage(format!("--omega: {e}")))?,
                None => ps.omega().clone(),
            };
            Ok(Outcome::value("invert", invert_two_form(&form)?))
        }
        Command::Bracket { space, f, g } => {
            let ps = phase_space(space)?;
            let (f, g) = (poly(ps.chart(), "f", f)?, poly(ps.chart(), "g", g)?);
            Ok(Outcome::value("bracket", ps.bracket(&f, &g)?))
        }
        Command::Hamiltonian { space, f } => {
            let ps = phase_space(space)?;
            let f = poly(ps.chart(), "f", f)?;
            Ok(Outcome::value("hamiltonian", ps.ham_vf(&f)?))
        }
        Command::Jacobiator { space, f, g, h } => {
            let ps = phase_space(space)?;
            let c = ps.chart().clone();
            let check = ps.eq_jacobi_check(&poly(&c, "f", f)?, &poly(&c, "g", g)?, &poly(&c, "h", h)?)?;
            Ok(Outcome::check(with_signs(check.report())))
        }
        Command::CheckTwisted { space } => {
            let ps = phase_space(space)?;
            Ok(Outcome::check(with_signs(ps.check_twisted().report())))
        }
        Command::Liouville { space, f } => {
            let ps = phase_space(space)?;
            let f = poly(ps.chart(), "f", f)?;
            Ok(Outcome::check(ps.liouville_check(&f)?.report()))
        }
        Command::LiePoisson { constants, jacobi } => lie_poisson_cmd(&load_constants(constants)?, *jacobi),
        Command::VlasovJacobiator { space, ka, kb, kc, f, radius } => {
            let ps = phase_space(space)?;
            let ch = ps.chart().clone();
            let r = radius
                .parse()
                .map_err(|_| Failure::Usage(format!("--radius: invalid rational `{radius}`")))?;
            let domain = IntegrationBox::symmetric(&ch, r)?;
            let lf = |flag: &str, s: &str| poly(&ch, flag, s).map(LinearFunctional::new);
            let density = BoxDensity::new(poly(&ch, "f", f)?, domain)?;
            let j = lifted_jacobiator(&ps, &lf("a", ka)?, &lf("b", kb)?, &lf("c", kc)?, &density)?;
            Ok(Outcome::check(j.report().with_meta("radius", radius.as_str())))
        }
        Command::OrbitIntegral { b, g, f, start, numeric, expect, within, csv } => {
            orbit_cmd(b, g, f, start, numeric, *expect, *within, csv.as_deref())
        }
        Command::ReproducePaper { b, anchors, step } => reproduce_cmd(b.as_deref(), anchors, *step),
    }
}

fn lie_poisson_cmd(s: &StructureConstants, jacobi: bool) -> Res<Outcome> {
    let pi = lie_poisson(s);
    if !jacobi {
        return Ok(Outcome::value("lie-poisson", pi));
    }
    let chart = Chart::dual(s.dim());
    let c: Vec<Polynomial> = (0..s.dim()).map(|i| Polynomial::coordinate(&chart, i)).collect();
    let mut defects = Vec::new();
    let mut matches = true;
    for i in 0..s.dim() {
        for j in i + 1..s.dim() {
            for k in j + 1..s.dim() {
                let dual = dual_jacobi_defect(s, &c[i], &c[j], &c[k])?;
                matches &= dual == pair_linear(&chart, &algebra_jacobi_defect(s, i, j, k)?);
                if !dual.is_zero() {
                    defects.push(format!("({},{},{}): {dual}", i + 1, j + 1, k + 1));
                }
            }
        }
    }
    let lhs = if defects.is_empty() { "0".to_string() } else { defects.join("; ") };
    let report = Report::new("lie-poisson-jacobi", defects.is_empty() && matches, lhs, "0")
        .with_meta("bivector", pi.to_string())
        .with_meta("matches_algebra_defect", matches)
        .with_meta("comparison", "dual jacobiator on all linear triples is zero");
    Ok(Outcome::check(report))
}

#[allow(clippy::too_many_arguments)]
fn orbit_cmd(
    b: &str,
    g: &str,
    f: &str,
    start: &[f64],
    numeric: &Numeric,
    expect: Option<f64>,
    within: f64,
    csv: Option<&std::path::Path>,
) -> Res<Outcome> {
    if start.is_empty() || !start.len().is_multiple_of(2) {
        return Err(Failure::Usage(format!(
            "--start needs 2n coordinates, got {}",
            start.len()
        )));
    }
    let space = Space {
        n: start.len() / 2,
        b: b.to_string(),
    };
    let ps = phase_space(&space)?;
    let g = poly(ps.chart(), "g", g)?;
    let hf = ps.ham_vf(&poly(ps.chart(), "f", f)?)?;
    let opts = PeriodOptions {
        step: match numeric.step {
            Some(s) => s,
            None => default_step()?,
        },
        max_time: numeric.max_time,
        tol: numeric.tol,
    };
    let r = flows::orbit_line_integral_with(&g, &hf, start, &opts)?;
    if let Some(path) = csv {
        let traj = flows::rk4_integrate(&hf, start, r.period / r.intervals as f64, r.intervals)?;
        csv_out::write_trajectory(path, &traj).map_err(Failure::from)?;
    }
    let pass = expect.is_none_or(|e| (r.value - e).abs() <= within);
    let rhs = expect.map_or_else(|| format!("{}", r.value), |e| format!("{e}"));
    let mut report = Report::new("orbit-integral", pass, format!("{}", r.value), rhs)
        .with_meta("period", r.period)
        .with_meta("step", r.step)
        .with_meta("intervals", r.intervals as u64)
        .with_meta("refined", r.refined)
        .with_meta("error_estimate", r.error_estimate)
        .with_meta("tol", opts.tol)
        .with_meta("max_time", opts.max_time);
    if expect.is_some() {
        report = report.with_meta("within", within);
    }
    let mut text = format!(
        "{}\nperiod = {}\nerror_estimate = {:e}",
        r.value, r.period, r.error_estimate
    );
    if let Some(e) = expect {
        text.push_str(&format!("\n{} |value - {e}| <= {within}", if pass { "PASS" } else { "FAIL" }));
    }
    Ok(Outcome { report, text })
}

fn reproduce_cmd(b: Option<&str>, overrides: &[String], step: Option<f64>) -> Res<Outcome> {
    let mut opts = ReproduceOptions {
        step: match step {
            Some(s) => s,
            None => default_step()?,
        },
        ..ReproduceOptions::default()
    };
    if let Some(src) = b {
        let field = parse_form_of_degree(&Chart::configuration(3), src, 2)
            .map_err(|e| Failure::Usage(format!("--B: {e}")))?;
        if field != opts.field {
            opts.anchors = None;
        }
        opts.field = field;
    }
    if !overrides.is_empty() {
        let anchors = opts.anchors.get_or_insert_with(Anchors::example);
        for item in overrides {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("--anchor expects KEY=VALUE, got `{item}`")))?;
            anchors.set(k.trim(), v)?;
        }
    }
    let run = reproduce_with(&opts);
    let report = run.report().with_meta("anchors", opts.anchors.is_some());
    Ok(Outcome {
        report,
        text: run.to_string(),
    })
}

fn emit_json(report: &Report) {
    let mut out = std::io::stdout().lock();
    let _ = serde_json::to_writer_pretty(&mut out, report);
    let _ = writeln!(out);
}

fn check_name(command: &Command) -> &'static str {
    match command {
        Command::D { .. } => "d",
        Command::Schouten { .. } => "schouten",
        Command::Invert { .. } => "invert",
        Command::Bracket { .. } => "bracket",
        Command::Hamiltonian { .. } => "hamiltonian",
        Command::Jacobiator { .. } => "jacobiator",
        Command::CheckTwisted { .. } => "check-twisted",
        Command::Liouville { .. } => "liouville",
        Command::LiePoisson { .. } => "lie-poisson",
        Command::VlasovJacobiator { .. } => "vlasov-jacobiator",
        Command::OrbitIntegral { .. } => "orbit-integral",
        Command::ReproducePaper { .. } => "reproduce-paper",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli.command) {
        Ok(outcome) => {
            if cli.json {
                emit_json(&outcome.report);
            } else {
                println!("{}", outcome.text);
            }
            ExitCode::from(if outcome.report.pass { 0 } else { 1 })
        }
        Err(failure) => {
            let (code, message) = match failure {
                Failure::Usage(m) => (2, m),
                Failure::Check(m) => (1, m),
            };
            if cli.json {
                let report = Report::new(check_name(&cli.command), false, "", "")
                    .with_meta("error", Value::from(message.clone()))
                    .with_meta("exit_code", code);
                emit_json(&report);
            }
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
