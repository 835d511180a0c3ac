//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always print.

use holonomy_forge::cylinder::CylinderIdentity;
use holonomy_forge::suite::{build_fixture, run, Report, SuiteConfig};
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { pass: true, detail: String::new() }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.pass = false;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(&what.into());
        }
    }

    fn note(&mut self, what: impl AsRef<str>) {
        if self.pass {
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(what.as_ref());
        }
    }

    /// Pass iff the check exists, computed, and is within its tolerance.
    fn check(&mut self, report: &Report, id: &str) -> Option<f64> {
        match report.find(id) {
            None => {
                self.require(false, format!("{}: {id} missing", report.fixture));
                None
            }
            Some(c) => {
                let r = c.residual;
                self.require(c.pass, format!("{}: {id} residual {:?} tol {:e}", report.fixture, r, c.tolerance));
                r
            }
        }
    }

    fn errors(&mut self, report: &Report) {
        for s in &report.suites {
            for e in &s.errors {
                self.require(false, format!("{}/{}: {e}", report.fixture, s.suite.as_str()));
            }
        }
    }
}

fn config(text: &str) -> SuiteConfig {
    SuiteConfig::parse(text).unwrap_or_else(|e| panic!("bad acceptance config: {e}\n{text}"))
}

fn execute(text: &str) -> Result<Report, String> {
    run(&config(text)).map_err(|e| e.to_string())
}

fn runner(o: &mut Outcome, text: &str) -> Option<Report> {
    match execute(text) {
        Ok(r) => {
            o.errors(&r);
            Some(r)
        }
        Err(e) => {
            o.require(false, e);
            None
        }
    }
}

fn connection_oracle() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let text = "fixture = eguchi-hanson\nfixture.a = 1\nsuites = connection\ngrid.samples = 200\n\
                tolerance.connection-table = 1e-8\ntolerance.connection-chart = 1e-5\n";
    if let Some(r) = runner(&mut o, text) {
        let t = o.check(&r, "connection-table");
        let c = o.check(&r, "connection-chart");
        o.note(format!("200 points, analytic {:.2e}, chart {:.2e}", t.unwrap_or(f64::NAN), c.unwrap_or(f64::NAN)));
    }
    let secs = start.elapsed().as_secs_f64();
    o.require(secs <= 10.0, format!("runtime {secs:.1} s > 10 s"));
    o.note(format!("{secs:.2} s"));
    o
}

fn codazzi_constructions() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    for fixture in ["warped", "warped-eh"] {
        let text = format!(
            "fixture = {fixture}\nsuites = codazzi\ngrid.samples = 20\ngrid.pairs = 25\n\
             tolerance.codazzi5 = 1e-6\ntolerance.codazzi6 = 1e-6\ntolerance.codazzi7 = 1e-6\n\
             tolerance.codazzi8 = 1e-6\ntolerance.codazzi9 = 1e-6\n"
        );
        if let Some(r) = runner(&mut o, &text) {
            let worst = ["codazzi5", "codazzi6", "codazzi7", "codazzi8"].iter().filter_map(|id| o.check(&r, id)).fold(0.0, f64::max);
            let h = o.check(&r, "codazzi9");
            o.note(format!("{fixture}: H {:.2e}, blocks {worst:.2e}", h.unwrap_or(f64::NAN)));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    o.require(secs <= 30.0, format!("runtime {secs:.1} s > 30 s"));
    o.note(format!("{secs:.2} s"));
    o
}

fn cylinder_identities() -> Outcome {
    let mut o = Outcome::new();
    let mut text = String::from("suites = cylinder\ngrid.configurations = 50\n");
    for id in CylinderIdentity::ALL {
        let tol = if id.is_curvature() { 1e-4 } else { 1e-6 };
        text.push_str(&format!("tolerance.{} = {tol:e}\n", id.id()));
    }
    let required = ["P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8", "P9", "P10", "P12", "P13", "P14", "P15", "curv0", "curv1", "curv2", "curv3"];
    for fixture in ["cylinder-torus", "cylinder-eh", "cylinder-product"] {
        if let Some(r) = runner(&mut o, &format!("fixture = {fixture}\n{text}")) {
            let worst = required.iter().filter_map(|id| o.check(&r, id)).fold(0.0, f64::max);
            o.note(format!("{fixture}: worst {worst:.2e}"));
        }
    }
    o.note("50 configurations each");
    o
}

fn flatness() -> Outcome {
    let mut o = Outcome::new();
    if let Some(r) = runner(&mut o, "fixture = cylinder-torus\nsuites = curvature\ntolerance.cylinder-flat = 1e-6\n") {
        let c = o.check(&r, "cylinder-flat");
        o.note(format!("torus cylinder max |R| {:.2e}", c.unwrap_or(f64::NAN)));
    }
    if let Some(r) = runner(&mut o, "fixture = cylinder-eh\nsuites = curvature\ntolerance.cylinder-curved = 1\n") {
        // Stored as 1e-2 / max|R|, so <= 1 means max|R| >= 1e-2.
        let ratio = o.check(&r, "cylinder-curved");
        o.note(format!("EH cylinder max |R| {:.2e}", 1e-2 / ratio.unwrap_or(f64::NAN)));
    }
    o
}

fn holonomy_dimensions() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let cases: [(&str, Option<usize>); 6] = [
        ("flat", Some(0)),
        ("flat-torus", Some(0)),
        ("warped", Some(6)),
        ("eguchi-hanson", Some(3)),
        ("cylinder-eh", Some(7)),
        ("cylinder-product", None),
    ];
    let mut seen = Vec::new();
    for (fixture, dim) in cases {
        let cfg = config(&format!("fixture = {fixture}\nsuites = holonomy\n"));
        match build_fixture(&cfg) {
            Ok(fx) => {
                if dim.is_some() {
                    o.require(fx.expected_holonomy == dim, format!("{fixture}: fixture expects {:?}", fx.expected_holonomy));
                }
                if fixture == "warped" {
                    o.require(fx.model.dim == 4, "warped fixture is not over the flat 3-torus");
                }
            }
            Err(e) => o.require(false, e.to_string()),
        }
        let text = format!("fixture = {fixture}\nsuites = holonomy\ntolerance.holonomy-gap = 1\n");
        if let Some(r) = runner(&mut o, &text) {
            if dim.is_some() {
                o.check(&r, "holonomy-dim");
            }
            o.check(&r, "holonomy-agree");
            o.check(&r, "holonomy-gap");
            match fixture {
                "cylinder-eh" => {
                    o.check(&r, "holonomy-p-fixed");
                    o.check(&r, "holonomy-pattern");
                }
                "cylinder-product" => {
                    o.check(&r, "holonomy-decomposable");
                }
                _ => {}
            }
            seen.push(match dim {
                Some(d) => format!("{fixture} {d}"),
                None => format!("{fixture} decomposable"),
            });
        }
    }
    let secs = start.elapsed().as_secs_f64();
    o.require(secs <= 300.0, format!("runtime {secs:.1} s > 300 s"));
    o.note(format!("{}; {secs:.2} s", seen.join(", ")));
    o
}

fn spinors() -> Outcome {
    let mut o = Outcome::new();
    let tolerances = "tolerance.killing = 1e-6\ntolerance.killing-norm = 1e-5\ntolerance.killing-current = 1e-5\n\
                      tolerance.killing-q = 1e-8\ntolerance.lift-parallel = 1e-5\ntolerance.lift-norm = 1e-6\n\
                      tolerance.ricci-constraint = 1e-4\ntolerance.transfer-q = 1e-8\n";
    for fixture in ["warped", "warped-eh"] {
        if let Some(r) = runner(&mut o, &format!("fixture = {fixture}\nsuites = spinor\n{tolerances}")) {
            for id in ["killing", "killing-norm", "killing-current", "killing-q", "ricci-constraint", "transfer-q"] {
                o.check(&r, id);
            }
        }
    }
    for fixture in ["cylinder-torus", "cylinder-eh"] {
        if let Some(r) = runner(&mut o, &format!("fixture = {fixture}\nsuites = spinor\n{tolerances}")) {
            let p = o.check(&r, "lift-parallel");
            let n = o.check(&r, "lift-norm");
            o.check(&r, "transfer-q");
            o.note(format!("{fixture}: |nabla psi~| {:.2e}, g(V,V)+q {:.2e}", p.unwrap_or(f64::NAN), n.unwrap_or(f64::NAN)));
        }
    }
    o
}

fn eh_obstruction() -> Outcome {
    let mut o = Outcome::new();
    if let Some(r) = runner(&mut o, "fixture = eguchi-hanson\nsuites = eh-obstruction\ntolerance.obstruction-homothetic = 1\n") {
        o.check(&r, "obstruction-dim");
        o.check(&r, "obstruction-stable");
        o.check(&r, "obstruction-identity");
        let ratio = o.check(&r, "obstruction-homothetic");
        o.note(format!("dimension 1 on both grids, homothetic sigma_min {:.2e}", 1e-3 / ratio.unwrap_or(f64::NAN)));
    }
    o
}

fn causality() -> Outcome {
    let mut o = Outcome::new();
    let text = "fixture = cylinder-torus-id\nsuites = causality\ntolerance.causality-gh-closed = 1e-10\ntolerance.causality-bbc-closed = 1e-10\n";
    if let Some(r) = runner(&mut o, text) {
        let g = o.check(&r, "causality-gh-closed");
        let b = o.check(&r, "causality-bbc-closed");
        o.note(format!("closed form gh {:.1e}, bbc {:.1e}", g.unwrap_or(f64::NAN), b.unwrap_or(f64::NAN)));
    }
    if let Some(r) = runner(&mut o, "fixture = cylinder-eh\nsuites = causality\n") {
        o.check(&r, "causality-gh-finite");
        o.check(&r, "causality-bbc-finite");
        o.note("EH cylinder bounds finite on every slice");
    }
    o
}

fn determinism() -> Outcome {
    let mut o = Outcome::new();
    let cfg = config("fixture = warped-eh\nseed = 2024\ngrid.samples = 8\ngrid.pairs = 6\n");
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let runs = [run(&cfg), run(&cfg), single.install(|| run(&cfg))];
    let texts: Vec<String> = runs
        .iter()
        .filter_map(|r| match r {
            Ok(r) => Some(r.to_json(false)),
            Err(e) => {
                o.require(false, e.to_string());
                None
            }
        })
        .collect();
    if texts.len() == 3 {
        o.require(texts[0] == texts[1], "repeated runs differ");
        o.require(texts[0] == texts[2], "single-threaded run differs");
        o.note(format!("3 runs, {} identical bytes each, all suites", texts[0].len()));
    }
    o
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("connection oracle agreement", connection_oracle),
        ("codazzi constructions", codazzi_constructions),
        ("cylinder identities", cylinder_identities),
        ("flatness equivalence", flatness),
        ("holonomy dimensions", holonomy_dimensions),
        ("spinor suite", spinors),
        ("eh obstruction", eh_obstruction),
        ("causality bounds", causality),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let out = f();
        if !out.pass {
            failed += 1;
        }
        println!("{} {}. {name}: {}", if out.pass { "PASS" } else { "FAIL" }, i + 1, out.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
