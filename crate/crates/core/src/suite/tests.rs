use super::*;
use crate::Error;
use std::collections::HashSet;

fn cfg(text: &str) -> SuiteConfig {
    SuiteConfig::parse(text).unwrap()
}

fn config_error(text: &str) -> String {
    match SuiteConfig::parse(text) {
        Err(Error::ConfigError(m)) => m,
        other => panic!("expected ConfigError, got {other:?}"),
    }
}

#[test]
fn parses_full_config() {
    let c = cfg("# demo\nfixture = eguchi-hanson\nfixture.a = 1.0\nsuites = curvature, connection\nseed = 9\ngrid.samples = 7\n\
                 tolerance.connection-table = 1e-9\noutput = out.json\n");
    assert_eq!(c.fixture, "eguchi-hanson");
    assert_eq!(c.params.get("a"), Some(&1.0));
    assert_eq!(c.effective_suites().unwrap(), vec![Suite::Connection, Suite::Curvature]);
    assert_eq!(c.seed, 9);
    assert_eq!(c.grid.samples, 7);
    assert_eq!(c.tolerances.get("connection-table"), Some(&1e-9));
    assert_eq!(c.output.as_deref(), Some(std::path::Path::new("out.json")));
}

#[test]
fn rejects_bad_configs() {
    assert!(config_error("fixture = flat\ncolour = blue\n").contains("unknown key"));
    assert!(config_error("fixture = flat\ngrid.density = 3\n").contains("grid.density"));
    assert!(config_error("fixture = flat\ntolerance.flat = -1\n").contains("positive"));
    assert!(config_error("fixture = flat\ntolerance.flat = 0\n").contains("positive"));
    assert!(config_error("fixture = flat\ntolerance.nonsense = 1e-3\n").contains("unknown check"));
    assert!(config_error("fixture = flat\nsuites = spinor\n").contains("does not apply"));
    assert!(config_error("fixture = flat\nsuites = teleport\n").contains("unknown suite"));
    assert!(config_error("fixture = flat\nfixture.a = 2\n").contains("no parameter"));
    assert!(config_error("fixture = flat\nseed = -3\n").contains("seed"));
    assert!(config_error("seed = 3\n").contains("missing"));
    assert!(config_error("fixture = flat\njust words\n").contains("key = value"));
    assert!(matches!(SuiteConfig::parse("fixture = klein-bottle\n"), Err(Error::FixtureError(_))));
}

#[test]
fn registry_is_consistent() {
    let checks = all_checks();
    let ids: HashSet<&str> = checks.iter().map(|c| c.id).collect();
    assert_eq!(ids.len(), checks.len());
    for c in &checks {
        assert!(!c.anchor.is_empty() && !c.summary.is_empty(), "{}", c.id);
        assert!(c.tolerance > 0.0);
    }
    for id in ["P1", "P15", "curv0", "curv3", "codazzi5", "codazzi9", "connection-table", "obstruction-dim"] {
        assert!(ids.contains(id), "{id}");
    }
}

#[test]
fn describe_prints_anchor() {
    assert!(describe("P1").unwrap().contains("W_t(X) = 2 H_t^{-1}(X)"));
    assert!(describe("codazzi9").unwrap().contains("E(s) = (1/f) (T + int_0^s b(sigma) f'(sigma) dsigma Id_F)"));
    assert!(describe("cylinder-eh").unwrap().contains("causality"));
    assert_eq!(describe("P11"), Err(Error::UnknownId("P11".into())));
}

#[test]
fn every_fixture_builds() {
    for f in FIXTURES {
        let fx = build_fixture(&SuiteConfig::new(f.name)).unwrap();
        assert_eq!(fx.basepoint.len(), fx.model.dim, "{}", f.name);
        assert!(fx.model.chart.inner_margin(&fx.basepoint).iter().all(|&m| m > 0.0), "{}", f.name);
    }
    let mut c = SuiteConfig::new("warped");
    c.params.insert("dim".into(), 2.5);
    assert!(matches!(build_fixture(&c), Err(Error::FixtureError(_))));
}

#[test]
fn scientific_format_has_six_digits() {
    assert_eq!(sci(1.0 / 3.0), "3.33333e-1");
    assert_eq!(sci(0.0), "0.00000e0");
    assert_eq!(sci(123456789.0), "1.23457e8");
    assert_eq!(sci(f64::INFINITY), "\"inf\"");
}

#[test]
fn flat_torus_curvature_is_zero() {
    let r = run(&cfg("fixture = flat-torus\nsuites = curvature\n")).unwrap();
    assert!(r.pass());
    assert!(r.checks().all(|c| c.residual == Some(0.0)));
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn corrupted_gamma_propagates_linearly() {
    let res = |d: f64| {
        let r = run(&cfg(&format!("fixture = eguchi-hanson\nfixture.gamma_offset = {d}\nsuites = connection\ngrid.samples = 5\n"))).unwrap();
        assert_eq!(r.exit_code(), 1);
        r.find("connection-table").unwrap().residual.unwrap()
    };
    let (a, b) = (res(1e-3), res(2e-3));
    assert!((a - 1e-3).abs() < 1e-12, "{a}");
    assert!((b / a - 2.0).abs() < 1e-9);
}

#[test]
fn reports_are_byte_stable() {
    let c = cfg("fixture = warped\nsuites = codazzi, curvature\nseed = 4\ngrid.samples = 4\ngrid.pairs = 3\n");
    let (a, b) = (run(&c).unwrap(), run(&c).unwrap());
    assert_eq!(a.to_json(false), b.to_json(false));
    assert!(!a.to_json(false).contains("timings"));
    assert!(a.to_json(true).contains("\"timings\""));
    let mut other = c.clone();
    other.seed = 5;
    assert_ne!(run(&other).unwrap().to_json(false), a.to_json(false));
}

#[test]
fn global_tolerance_only_touches_residual_checks() {
    let mut c = cfg("fixture = flat\nsuites = holonomy\n");
    c.set_global_tolerance(1e-30).unwrap();
    let r = run(&c).unwrap();
    assert_eq!(r.find("holonomy-dim").unwrap().tolerance, 0.5);
    assert_eq!(r.find("holonomy-agree").unwrap().tolerance, 1e-30);
    c.set_tolerance("holonomy-dim", 0.25).unwrap();
    assert_eq!(run(&c).unwrap().find("holonomy-dim").unwrap().tolerance, 0.25);
}

#[test]
fn report_json_parses_with_fixed_key_order() {
    let r = run(&cfg("fixture = hessian\nsuites = codazzi\ngrid.samples = 3\n")).unwrap();
    let text = r.to_json(true);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["summary"]["pass"], serde_json::Value::Bool(true));
    let keys = ["\"tool\"", "\"fixture\"", "\"suites\"", "\"summary\"", "\"environment\"", "\"timings\""];
    let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
    let check = &v["suites"][0]["checks"][0];
    let names: Vec<&str> = check.as_object().unwrap().keys().map(|s| s.as_str()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    let mut expect = vec!["anchor", "check_id", "pass", "residual", "tolerance"];
    expect.sort();
    assert_eq!(sorted, expect);
    let cid = text.find("\"check_id\"").unwrap();
    assert!(cid < text.find("\"anchor\"").unwrap() && text.find("\"residual\"").unwrap() < text.find("\"tolerance\"").unwrap());
}
