//! Suite configuration: flat `key = value` text with dotted section keys.
//!
//! ```text
//! # comment
//! fixture = eguchi-hanson
//! fixture.a = 1.0
//! suites = connection, curvature
//! seed = 7
//! grid.samples = 20
//! tolerance.connection-table = 1e-9
//! output = report.json
//! ```

use super::fixture::{fixture_spec, FixtureSpec};
use super::registry;
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Connection,
    Curvature,
    Codazzi,
    Cylinder,
    Holonomy,
    Spinor,
    Causality,
    EhObstruction,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Connection,
        Suite::Curvature,
        Suite::Codazzi,
        Suite::Cylinder,
        Suite::Holonomy,
        Suite::Spinor,
        Suite::Causality,
        Suite::EhObstruction,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Connection => "connection",
            Suite::Curvature => "curvature",
            Suite::Codazzi => "codazzi",
            Suite::Cylinder => "cylinder",
            Suite::Holonomy => "holonomy",
            Suite::Spinor => "spinor",
            Suite::Causality => "causality",
            Suite::EhObstruction => "eh-obstruction",
        }
    }

    pub fn parse(s: &str) -> Result<Suite> {
        Suite::ALL.iter().copied().find(|x| x.as_str() == s).ok_or_else(|| Error::ConfigError(format!("unknown suite '{s}'")))
    }
}

/// Sampling densities.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    /// Random points for connection, curvature and Codazzi checks.
    pub samples: usize,
    /// Random direction pairs per point for Codazzi checks.
    pub pairs: usize,
    /// Configurations per cylinder identity.
    pub configurations: usize,
    /// Chebyshev nodes of the obstruction system (doubled for the stability check).
    pub obstruction: usize,
    /// Time slices for the causality bounds.
    pub slices: usize,
    /// Remote points for holonomy sampling.
    pub remote: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { samples: 20, pairs: 25, configurations: 50, obstruction: 16, slices: 5, remote: 20 }
    }
}

impl Grid {
    pub const KEYS: [&'static str; 6] = ["samples", "pairs", "configurations", "obstruction", "slices", "remote"];

    fn set(&mut self, key: &str, v: usize) -> Result<()> {
        if v == 0 {
            return Err(Error::ConfigError(format!("grid.{key} must be positive")));
        }
        match key {
            "samples" => self.samples = v,
            "pairs" => self.pairs = v,
            "configurations" => self.configurations = v,
            "obstruction" => self.obstruction = v,
            "slices" => self.slices = v,
            "remote" => self.remote = v,
            _ => return Err(Error::ConfigError(format!("unknown key 'grid.{key}'"))),
        }
        Ok(())
    }

    pub fn entries(&self) -> [(&'static str, usize); 6] {
        [
            ("samples", self.samples),
            ("pairs", self.pairs),
            ("configurations", self.configurations),
            ("obstruction", self.obstruction),
            ("slices", self.slices),
            ("remote", self.remote),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub fixture: String,
    /// Fixture parameters, by name.
    pub params: BTreeMap<String, f64>,
    /// Empty means every suite the fixture supports.
    pub suites: Vec<Suite>,
    /// Per-check tolerance overrides.
    pub tolerances: BTreeMap<String, f64>,
    /// Applies to every residual-kind check without its own override.
    pub global_tolerance: Option<f64>,
    pub seed: u64,
    pub grid: Grid,
    pub output: Option<PathBuf>,
}

impl SuiteConfig {
    pub fn new(fixture: &str) -> Self {
        SuiteConfig {
            fixture: fixture.to_string(),
            params: BTreeMap::new(),
            suites: Vec::new(),
            tolerances: BTreeMap::new(),
            global_tolerance: None,
            seed: 1,
            grid: Grid::default(),
            output: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SuiteConfig::new("");
        let mut seen_fixture = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::ConfigError(format!("line {}: {msg}", lineno + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(err(format!("empty value for '{key}'")));
            }
            let (section, rest) = match key.split_once('.') {
                Some((s, r)) => (s, Some(r)),
                None => (key, None),
            };
            match (section, rest) {
                ("fixture", None) => {
                    cfg.fixture = value.to_string();
                    seen_fixture = true;
                }
                ("fixture", Some(p)) => {
                    cfg.params.insert(p.to_string(), parse_f64(value).map_err(|m| err(format!("fixture.{p}: {m}")))?);
                }
                ("suites", None) => {
                    cfg.suites = value.split(',').map(|s| Suite::parse(s.trim())).collect::<Result<_>>().map_err(|e| err(e.to_string()))?;
                }
                ("seed", None) => cfg.seed = value.parse().map_err(|_| err(format!("seed '{value}' is not a non-negative integer")))?,
                ("grid", Some(g)) => {
                    let v: usize = value.parse().map_err(|_| err(format!("grid.{g} '{value}' is not a non-negative integer")))?;
                    cfg.grid.set(g, v).map_err(|e| err(e.to_string()))?;
                }
                ("tolerance", Some(id)) => {
                    let v = parse_f64(value).map_err(|m| err(format!("tolerance.{id}: {m}")))?;
                    cfg.set_tolerance(id, v).map_err(|e| err(e.to_string()))?;
                }
                ("output", None) => cfg.output = Some(PathBuf::from(value)),
                _ => return Err(err(format!("unknown key '{key}'"))),
            }
        }
        if !seen_fixture {
            return Err(Error::ConfigError("missing 'fixture' key".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set_tolerance(&mut self, id: &str, v: f64) -> Result<()> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::ConfigError(format!("tolerance for '{id}' must be positive, got {v}")));
        }
        let c = registry::lookup(id).map_err(|_| Error::ConfigError(format!("tolerance for unknown check '{id}'")))?;
        self.tolerances.insert(c.id.to_string(), v);
        Ok(())
    }

    pub fn set_global_tolerance(&mut self, v: f64) -> Result<()> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::ConfigError(format!("tolerance must be positive, got {v}")));
        }
        self.global_tolerance = Some(v);
        Ok(())
    }

    pub fn spec(&self) -> Result<&'static FixtureSpec> {
        fixture_spec(&self.fixture)
    }

    /// Fixture exists, parameters belong to it, requested suites apply.
    pub fn validate(&self) -> Result<()> {
        let spec = self.spec()?;
        for k in self.params.keys() {
            if !spec.params.contains(&k.as_str()) {
                return Err(Error::ConfigError(format!("fixture '{}' has no parameter '{k}'", spec.name)));
            }
        }
        for s in &self.suites {
            if !spec.suites.contains(s) {
                return Err(Error::ConfigError(format!("suite '{}' does not apply to fixture '{}'", s.as_str(), spec.name)));
            }
        }
        Ok(())
    }

    /// Requested suites in canonical order, or every applicable one.
    pub fn effective_suites(&self) -> Result<Vec<Suite>> {
        let spec = self.spec()?;
        let mut out: Vec<Suite> = if self.suites.is_empty() { spec.suites.to_vec() } else { self.suites.clone() };
        out.sort();
        out.dedup();
        Ok(out)
    }

    pub fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    pub fn tolerance_for(&self, c: &registry::CheckInfo) -> f64 {
        if let Some(v) = self.tolerances.get(c.id) {
            return *v;
        }
        match (c.kind, self.global_tolerance) {
            (registry::CheckKind::Residual, Some(v)) => v,
            _ => c.tolerance,
        }
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("'{s}' is not a finite number")),
    }
}
