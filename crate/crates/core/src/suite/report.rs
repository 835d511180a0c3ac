//! Report assembly and the fixed-key-order JSON writer.

use super::config::{Grid, Suite};
use std::collections::BTreeMap;
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub check_id: String,
    pub anchor: String,
    /// `None` when the computation itself failed.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<CheckResult>,
    /// Library errors raised while computing checks.
    pub errors: Vec<String>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.errors.is_empty() && self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub fixture: String,
    pub params: BTreeMap<String, f64>,
    pub suites: Vec<SuiteReport>,
    pub version: String,
    pub seed: u64,
    pub grid: Grid,
    pub total_seconds: f64,
}

/// Six significant digits in scientific notation.
pub fn sci(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.5e}")
    } else {
        // Not representable as a JSON number.
        format!("\"{x}\"")
    }
}

fn string(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization")
}

impl Report {
    pub fn summary(&self) -> Summary {
        let checks: usize = self.suites.iter().map(|s| s.checks.len()).sum();
        let passed = self.suites.iter().flat_map(|s| &s.checks).filter(|c| c.pass).count();
        let errors = self.suites.iter().map(|s| s.errors.len()).sum();
        Summary { checks, passed, failed: checks - passed, errors }
    }

    pub fn pass(&self) -> bool {
        self.suites.iter().all(|s| s.pass())
    }

    pub fn checks(&self) -> impl Iterator<Item = &CheckResult> {
        self.suites.iter().flat_map(|s| &s.checks)
    }

    pub fn find(&self, id: &str) -> Option<&CheckResult> {
        self.checks().find(|c| c.check_id == id)
    }

    /// Process exit status: 0 when everything passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            0
        } else {
            1
        }
    }

    /// The report document. Everything except the trailing `timings`
    /// block is a function of the configuration and seed alone.
    pub fn to_json(&self, include_timings: bool) -> String {
        let mut o = String::new();
        o.push_str("{\n");
        let _ = writeln!(o, "  \"tool\": {},", string("holonomy-forge"));
        o.push_str("  \"fixture\": {\n");
        let _ = writeln!(o, "    \"name\": {},", string(&self.fixture));
        o.push_str("    \"parameters\": {");
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{}: {}", string(k), sci(*v))).collect();
        o.push_str(&params.join(", "));
        o.push_str("}\n  },\n");
        o.push_str("  \"suites\": [");
        for (i, s) in self.suites.iter().enumerate() {
            o.push_str(if i == 0 { "\n" } else { ",\n" });
            o.push_str("    {\n");
            let _ = writeln!(o, "      \"suite\": {},", string(s.suite.as_str()));
            let _ = writeln!(o, "      \"pass\": {},", s.pass());
            o.push_str("      \"checks\": [");
            for (j, c) in s.checks.iter().enumerate() {
                o.push_str(if j == 0 { "\n" } else { ",\n" });
                let residual = c.residual.map_or("null".to_string(), sci);
                let _ = write!(
                    o,
                    "        {{\"check_id\": {}, \"anchor\": {}, \"residual\": {}, \"tolerance\": {}, \"pass\": {}}}",
                    string(&c.check_id),
                    string(&c.anchor),
                    residual,
                    sci(c.tolerance),
                    c.pass
                );
            }
            o.push_str(if s.checks.is_empty() { "],\n" } else { "\n      ],\n" });
            let errs: Vec<String> = s.errors.iter().map(|e| string(e)).collect();
            let _ = writeln!(o, "      \"errors\": [{}]", errs.join(", "));
            o.push_str("    }");
        }
        o.push_str(if self.suites.is_empty() { "],\n" } else { "\n  ],\n" });
        let sm = self.summary();
        let _ = writeln!(
            o,
            "  \"summary\": {{\"checks\": {}, \"passed\": {}, \"failed\": {}, \"errors\": {}, \"pass\": {}}},",
            sm.checks,
            sm.passed,
            sm.failed,
            sm.errors,
            self.pass()
        );
        let grid: Vec<String> = self.grid.entries().iter().map(|(k, v)| format!("{}: {v}", string(k))).collect();
        let _ = write!(
            o,
            "  \"environment\": {{\"version\": {}, \"seed\": {}, \"grid\": {{{}}}}}",
            string(&self.version),
            self.seed,
            grid.join(", ")
        );
        if include_timings {
            let per: Vec<String> = self.suites.iter().map(|s| format!("{}: {:.3}", string(s.suite.as_str()), s.seconds)).collect();
            let _ = write!(o, ",\n  \"timings\": {{\"total_seconds\": {:.3}, \"suites\": {{{}}}}}", self.total_seconds, per.join(", "));
        }
        o.push_str("\n}\n");
        o
    }

    /// One line per check, for terminals.
    pub fn text_summary(&self) -> String {
        let mut o = String::new();
        for s in &self.suites {
            for c in &s.checks {
                let r = c.residual.map_or("error".to_string(), |r| format!("{r:.5e}"));
                let _ = writeln!(
                    o,
                    "{} {:<15} {:<24} residual {:>12} tol {:.1e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    s.suite.as_str(),
                    c.check_id,
                    r,
                    c.tolerance
                );
            }
            for e in &s.errors {
                let _ = writeln!(o, "ERROR {:<14} {e}", s.suite.as_str());
            }
        }
        let sm = self.summary();
        let _ = writeln!(o, "{} checks, {} passed, {} failed, {} errors", sm.checks, sm.passed, sm.failed, sm.errors);
        o
    }
}
