use std::process::Command;

use serde_json::Value;
use twistkit::exterior::d;
use twistkit::magnetic::PhaseSpace;
use twistkit::poly::Chart;
use twistkit_testkit::Gen;

const EXAMPLE_B: &str = "x2^2*dx2^dx3 + x1*x2*dx1^dx3";

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_twistkit"));
    cmd.args(args).env_remove("TWISTKIT_STEP");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Output {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = run(&full);
    let v: Value = serde_json::from_str(&out.stdout)
        .unwrap_or_else(|e| panic!("not JSON ({e}): {}", out.stdout));
    (out.code, v)
}

fn schema() -> jsonschema::JSONSchema {
    let text = include_str!("../schema/report.schema.json");
    let value: &'static Value = Box::leak(Box::new(serde_json::from_str(text).unwrap()));
    jsonschema::JSONSchema::compile(value).expect("valid schema")
}

#[test]
fn schouten_of_example_field() {
    let out = run(&["schouten", "--n", "3", "--B", EXAMPLE_B]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.trim(), "2*x1*@p1^@p2^@p3");
}

#[test]
fn check_twisted_without_field() {
    let (code, v) = json(&["check-twisted", "--n", "3", "--B", "0"]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], true);
    assert_eq!((v["lhs"].as_str(), v["rhs"].as_str()), (Some("0"), Some("0")));
    assert_eq!(v["meta"]["sigma_J"], 1);
}

#[test]
fn orbit_integral_is_pi() {
    let out = run(&["orbit-integral", "--g", "x1^2", "--f", "x1*p2 - x2*p1", "--start", "1,0,0,0,0,0"]);
    assert_eq!(out.code, 0);
    let value: f64 = out.stdout.lines().next().unwrap().parse().unwrap();
    assert!((value - std::f64::consts::PI).abs() < 1e-6);
    let fail = run(&[
        "orbit-integral", "--g", "x1^2", "--f", "x1*p2 - x2*p1", "--start", "1,0,0,0,0,0", "--expect", "3",
    ]);
    assert_eq!(fail.code, 1);
}

#[test]
fn computed_values() {
    let b = ["--B", EXAMPLE_B];
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["bracket", "--f", "p2", "--g", "p3"], "x2^2"),
        (vec!["hamiltonian", "--f", "p1"], "@x1 - x1*x2*@p3"),
        (vec!["invert"], "@x1^@p1 + @x2^@p2 + @x3^@p3 + x1*x2*@p1^@p3 + x2^2*@p2^@p3"),
        (vec!["invert", "--omega", "dp1^dx1 + dp2^dx2 + dp3^dx3"], "@x1^@p1 + @x2^@p2 + @x3^@p3"),
    ];
    for (mut args, want) in cases {
        args.extend_from_slice(&b);
        let out = run(&args);
        assert_eq!((out.code, out.stdout.trim()), (0, want), "{args:?}");
    }
    let out = run(&["d", "--form", "x1*x2*dx3", "--chart", "x1,x2,x3"]);
    assert_eq!(out.stdout.trim(), "x2*dx1^dx3 + x1*dx2^dx3");
    let out = run(&["lie-poisson", "--constants", "so3"]);
    assert_eq!(out.stdout.trim(), "c3*@c1^@c2 - c2*@c1^@c3 + c1*@c2^@c3");
}

#[test]
fn checks_report_pass_and_fail() {
    let out = run(&["jacobiator", "--B", EXAMPLE_B, "--f", "p1", "--g", "p2", "--h", "p3"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("PASS jacobiator"));
    assert!(out.stdout.contains("lhs: -x1"));
    let out = run(&["liouville", "--B", EXAMPLE_B, "--f", "x1*p2 - x2*p1"]);
    assert_eq!(out.code, 0);
    let (code, v) = json(&[
        "vlasov-jacobiator", "--B", EXAMPLE_B, "--a", "p1", "--b", "p2", "--c", "p3", "--f", "x1",
    ]);
    assert_eq!((code, v["lhs"].as_str(), v["rhs"].as_str()), (0, Some("-64/3"), Some("-64/3")));
    let perturbed = r#"{"d":3,"c":[[3,1,2,1],[3,2,1,-1],[1,2,3,1],[1,3,2,-1],[2,3,1,1],[2,1,3,-1],[1,1,2,1],[1,2,1,-1]]}"#;
    let out = run(&["lie-poisson", "--constants", perturbed, "--jacobi"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.starts_with("FAIL"));
    assert_eq!(run(&["lie-poisson", "--constants", "so3", "--jacobi"]).code, 0);
}

#[test]
fn constants_file_is_read() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.json");
    std::fs::write(&path, r#"{"d": 2, "c": [[1, 1, 2, 1], [1, 2, 1, -1]]}"#).unwrap();
    let out = run(&["lie-poisson", "--constants", path.to_str().unwrap()]);
    assert_eq!((out.code, out.stdout.trim()), (0, "c1*@c1^@c2"));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"d": 2, "c": [[1, 1, 2, 1]]}"#).unwrap();
    let out = run(&["lie-poisson", "--constants", bad.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("antisymmetric"));
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["bracket", "--f", "x1 + q9", "--g", "p1"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 1, column 6"), "{}", out.stderr);
    assert!(out.stderr.contains("`q9`"));
    let out = run(&["bracket", "--f", "x1 +", "--g", "p1"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 1"));
    let out = run(&["check-twisted", "--B", "p1*dx1^dx2"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("momentum"));
    assert_eq!(run(&["invert", "--n", "1", "--omega", "x1*dx1^dp1"]).code, 2);
    assert_eq!(run(&["no-such-command"]).code, 2);
    assert_eq!(run(&["bracket", "--f", "x1"]).code, 2);
    assert_eq!(run(&["--help"]).code, 0);
    let (code, v) = json(&["bracket", "--f", "x1 + q9", "--g", "p1"]);
    assert_eq!(code, 2);
    assert_eq!(v["pass"], false);
    assert_eq!(v["meta"]["exit_code"], 2);
}

#[test]
fn reproduce_paper_runs_and_names_failures() {
    let out = run(&["reproduce-paper"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.trim_end().ends_with("verdict: NOT twisted Poisson on density space"));
    let out = run(&["reproduce-paper", "--anchor", "schouten=2*x1*@p1^@p2"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("stage `schouten` failed"));
    let out = run(&["reproduce-paper", "--B", "0"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("stage `witness` failed"));
    assert_eq!(run(&["reproduce-paper", "--anchor", "bogus=1"]).code, 2);
}

#[test]
fn every_json_report_matches_schema() {
    let schema = schema();
    let commands: Vec<Vec<&str>> = vec![
        vec!["d", "--form", "x1*dp1"],
        vec!["schouten", "--B", EXAMPLE_B],
        vec!["invert", "--B", EXAMPLE_B],
        vec!["bracket", "--f", "x1", "--g", "p1"],
        vec!["hamiltonian", "--f", "x1*p2"],
        vec!["jacobiator", "--B", EXAMPLE_B, "--f", "p1", "--g", "p2", "--h", "p3"],
        vec!["check-twisted", "--B", EXAMPLE_B],
        vec!["liouville", "--B", EXAMPLE_B, "--f", "p3"],
        vec!["lie-poisson", "--constants", "so3"],
        vec!["lie-poisson", "--constants", "so3", "--jacobi"],
        vec!["vlasov-jacobiator", "--B", EXAMPLE_B, "--a", "p1", "--b", "p2", "--c", "p3", "--f", "1"],
        vec!["orbit-integral", "--g", "x1^2", "--f", "x1*p2 - x2*p1", "--start", "1,0,0,0,0,0"],
        vec!["reproduce-paper"],
        vec!["reproduce-paper", "--anchor", "phi=0"],
        vec!["bracket", "--f", "q", "--g", "p1"],
    ];
    for args in commands {
        let (_, v) = json(&args);
        let msgs: Vec<String> = match schema.validate(&v) {
            Ok(()) => Vec::new(),
            Err(errors) => errors.map(|e| e.to_string()).collect(),
        };
        assert!(msgs.is_empty(), "{args:?}: {msgs:?}");
    }
}

#[test]
fn csv_trajectory_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("orbit.csv");
    let out = run(&[
        "orbit-integral", "--g", "x1^2", "--f", "x1*p2 - x2*p1", "--start", "1,0,0,0,0,0",
        "--step", "0.01", "--csv", path.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0);
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["t", "x1", "x2", "x3", "p1", "p2", "p3"]);
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(|s| s.parse().unwrap()).collect())
        .collect();
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    assert!((629..=632).contains(&rows.len()));
    assert_eq!(rows[0], vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let last = rows.last().unwrap();
    assert!((last[0] - 2.0 * std::f64::consts::PI).abs() < 1e-6);
    assert!((last[1] - 1.0).abs() < 1e-6 && last[2].abs() < 1e-6);
}

#[test]
fn step_comes_from_environment() {
    let args = ["--json", "orbit-integral", "--g", "x1^2", "--f", "x1*p2 - x2*p1", "--start", "1,0,0,0,0,0"];
    let out = run_env(&args, &[("TWISTKIT_STEP", "0.005")]);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["meta"]["step"], 0.005);
    let out = run(&args);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["meta"]["step"], 0.001);
    assert_eq!(run_env(&args, &[("TWISTKIT_STEP", "fast")]).code, 2);
}

#[test]
fn printed_expressions_round_trip_through_the_cli() {
    let ps = PhaseSpace::example();
    let mut g = Gen::new(41);
    for _ in 0..5 {
        let f = g.polynomial(ps.chart(), 2, 3);
        let h = g.polynomial(ps.chart(), 2, 3);
        let (fs, hs) = (f.to_string(), h.to_string());
        let out = run(&["bracket", "--B", EXAMPLE_B, "--f", &fs, "--g", &hs]);
        assert_eq!(out.stdout.trim(), ps.bracket(&f, &h).unwrap().to_string());
        let form = g.form(&Chart::phase_space(3), 1, 2);
        let out = run(&["d", "--form", &form.to_string()]);
        assert_eq!(out.stdout.trim(), d(&form).to_string());
    }
}
