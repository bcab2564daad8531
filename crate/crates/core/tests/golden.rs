use twistkit::magnetic::CONTRACTION_SIGN;
use twistkit::parse::{parse_expression, Expression};
use twistkit::poly::Chart;
use twistkit::reproduce::{reproduce_counterexample, Anchors};

const CHAIN: [&str; 3] = ["contraction", "sharp", "witness"];

fn golden() -> Vec<(String, String)> {
    include_str!("golden/example_anchors.txt")
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (k, v) = l.split_once('|').expect("key | value");
            (k.trim().to_string(), v.trim().to_string())
        })
        .collect()
}

fn canonical(key: &str, src: &str) -> String {
    let e = parse_expression(&Chart::phase_space(3), src).unwrap();
    let flip = CHAIN.contains(&key) && CONTRACTION_SIGN < 0;
    match e {
        Expression::Scalar(p) => if flip { -p } else { p }.to_string(),
        Expression::Form(f) => if flip { f.neg() } else { f }.to_string(),
        Expression::Multivector(m) => if flip { m.neg() } else { m }.to_string(),
    }
}

#[test]
fn computed_objects_match_golden_displays() {
    let run = reproduce_counterexample();
    assert!(run.verdict(), "{run}");
    let lookup = |key: &str| -> String {
        run.stages
            .iter()
            .flat_map(|s| s.objects.iter())
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| panic!("no object `{key}` in the report"))
    };
    let rows = golden();
    assert_eq!(rows.len(), 11);
    for (key, display) in rows {
        assert_eq!(lookup(&key), canonical(&key, &display), "{key}");
    }
}

#[test]
fn built_in_anchors_match_golden_displays() {
    let anchors = Anchors::example();
    for (key, display) in golden() {
        assert_eq!(anchors.get(&key), canonical(&key, &display), "{key}");
    }
}
