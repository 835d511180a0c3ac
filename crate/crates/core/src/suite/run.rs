//! Suite runners.

use super::config::{Suite, SuiteConfig};
use super::fixture::{build_fixture, Fixture};
use super::registry;
use super::report::{CheckResult, Report, SuiteReport};
use crate::cylinder::{
    adapted_basis, causality_bounds, check_identity, max_curvature, p_field, CausalityGrid, CylinderIdentity, CylinderModel, BOUND_CEILING,
};
use crate::error::{Error, Result};
use crate::geometry::{frame_connection_table, frame_connection_table_chart, metric_compatibility_residual, riemann, ManifoldModel};
use crate::holonomy::{classify_blocks, holonomy_both, AdaptedFrame, HolonomyOptions, Verdict};
use crate::sampling;
use crate::spin::{
    check_warped_killing, construct_warped_killing_spinor, dirac_current, lift_to_cylinder, local_samples, phi_a_transfer,
    ricci_constraint_residual, KillingOptions, KillingSpinor, LiftOptions,
};
use crate::warped::{
    build_e_family, check_bde_conditions, constant_b_split, covariant_endo, pullback_model, EndomorphismField, WarpedProductModel,
    SYMMETRY_TOL,
};
use crate::zoo::{averaging_check, eh_codazzi_obstruction};
use nalgebra::DVector;
use rayon::prelude::*;
use std::sync::Arc;
use std::time::Instant;

struct Recorder<'a> {
    cfg: &'a SuiteConfig,
    checks: Vec<CheckResult>,
    errors: Vec<String>,
}

impl<'a> Recorder<'a> {
    fn new(cfg: &'a SuiteConfig) -> Self {
        Recorder { cfg, checks: Vec::new(), errors: Vec::new() }
    }

    fn record(&mut self, id: &str, value: Result<f64>) {
        let info = registry::lookup(id).expect("registered check id");
        let tolerance = self.cfg.tolerance_for(&info);
        let (residual, pass) = match value {
            Ok(v) => (Some(v), v <= tolerance),
            Err(e) => {
                self.errors.push(format!("{}: {e}", info.id));
                (None, false)
            }
        };
        self.checks.push(CheckResult { check_id: info.id.to_string(), anchor: info.anchor.to_string(), residual, tolerance, pass });
    }

    /// Records an error that prevents a group of checks from running.
    fn fail_all(&mut self, ids: &[&str], e: &Error) {
        for id in ids {
            self.record(id, Err(e.clone()));
        }
    }
}

/// Seed of one suite, derived from the configured seed.
fn suite_seed(cfg: &SuiteConfig, suite: Suite) -> u64 {
    cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(suite as u64 + 1)
}

fn sample_points(model: &ManifoldModel, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = sampling::rng(seed);
    sampling::random_points(&mut rng, &model.chart, 0.05, count)
}

fn max_over<F>(points: &[Vec<f64>], f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let vals: Vec<f64> = points.par_iter().map(|p| f(p)).collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, |a: f64, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) }))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()))
}

fn with_root(x: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0];
    v.extend_from_slice(x);
    v
}

/// Codazzi defect over orthonormal pairs and `pairs` random unit pairs at
/// each point.
pub fn sampled_codazzi_residual(model: &ManifoldModel, a: &EndomorphismField, points: &[Vec<f64>], pairs: usize, seed: u64) -> Result<f64> {
    let indexed: Vec<(usize, Vec<f64>)> = points.iter().cloned().enumerate().collect();
    let vals: Vec<f64> = indexed
        .par_iter()
        .map(|(i, p)| {
            a.check_symmetric(model, p, SYMMETRY_TOL)?;
            let cov = covariant_endo(model, a, p)?;
            let mut rng = sampling::rng(seed.wrapping_add(*i as u64));
            let g = model.metric(p);
            let mut worst = cov.max_residual();
            for _ in 0..pairs {
                let x = sampling::random_unit_vector(&mut rng, &g);
                let y = sampling::random_unit_vector(&mut rng, &g);
                worst = worst.max(cov.residual(&x, &y));
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// b(s) = 1 + 0.3 sin s in the H(b, 0, E) construction.
pub fn default_profile() -> crate::warped::ScalarFn {
    Arc::new(|s: f64| 1.0 + 0.3 * s.sin())
}

fn connection_suite(fx: &Fixture, cfg: &SuiteConfig, r: &mut Recorder) {
    let seed = suite_seed(cfg, Suite::Connection);
    let pts = sample_points(&fx.model, cfg.grid.samples, seed);
    if let (Some(eh), true) = (&fx.eh, fx.eh_is_model) {
        let m = &fx.model;
        r.record("connection-table", max_over(&pts, |p| Ok(max_abs_diff(&eh.connection_table(p[0]), &frame_connection_table(m, p)?))));
        r.record(
            "connection-chart",
            max_over(&pts, |p| Ok(max_abs_diff(&eh.connection_table(p[0]), &frame_connection_table_chart(m, p)?))),
        );
    } else if fx.model.frame().is_some() {
        let m = &fx.model;
        r.record("connection-chart", max_over(&pts, |p| Ok(max_abs_diff(&frame_connection_table(m, p)?, &frame_connection_table_chart(m, p)?))));
    }
    r.record("metric-compat", max_over(&pts, |p| metric_compatibility_residual(&fx.model, p)));
}

fn curvature_suite(fx: &Fixture, cfg: &SuiteConfig, r: &mut Recorder) {
    let seed = suite_seed(cfg, Suite::Curvature);
    let m = &fx.model;
    let pts = sample_points(m, cfg.grid.samples, seed);
    let samples: Result<Vec<_>> = pts.par_iter().map(|p| riemann(m, p)).collect();
    let samples = match samples {
        Ok(s) => s,
        Err(e) => {
            r.fail_all(&["curvature-symmetries"], &e);
            return;
        }
    };
    r.record("curvature-symmetries", Ok(samples.iter().map(|s| s.symmetry_residuals().max()).fold(0.0, f64::max)));
    if let Some(cyl) = &fx.cylinder {
        let count = cfg.grid.samples;
        match max_curvature(cyl, count, seed) {
            Ok(c) if fx.flat => r.record("cylinder-flat", Ok(c)),
            Ok(c) => r.record("cylinder-curved", Ok(1e-2 / c)),
            Err(e) => r.record(if fx.flat { "cylinder-flat" } else { "cylinder-curved" }, Err(e)),
        }
        return;
    }
    if fx.flat {
        r.record("flat", Ok(samples.iter().map(|s| s.max_abs()).fold(0.0, f64::max)));
    }
    if fx.ricci_flat {
        r.record("ricci-flat", Ok(samples.iter().map(|s| s.ricci_endomorphism().amax()).fold(0.0, f64::max)));
    }
    if fx.hyperbolic {
        let n = m.dim;
        let worst = samples
            .iter()
            .map(|s| {
                let g = &s.metric;
                let e = |k: usize| DVector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 });
                let mut w = 0.0_f64;
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            let lhs = s.apply(&e(i), &e(j), &e(k));
                            let rhs = (e(i) * g[(j, k)] - e(j) * g[(i, k)]) * -4.0;
                            w = w.max((lhs - rhs).amax());
                        }
                    }
                }
                w
            })
            .fold(0.0, f64::max);
        r.record("constant-curvature", Ok(worst));
    }
}

/// H(b, 0, E) over the warped fixture with b = 1 + 0.3 sin s.
fn codazzi9_tensor(wp: &WarpedProductModel, t: &EndomorphismField, seed: u64) -> Result<(crate::warped::BdeSplit, EndomorphismField)> {
    let checks = sample_points(&wp.fiber, 5, seed);
    let fam = build_e_family(t, default_profile(), wp, &checks, 1e-6)?;
    let split = fam.split();
    let h = split.assemble(wp);
    Ok((split, h))
}

fn codazzi_suite(fx: &Fixture, cfg: &SuiteConfig, r: &mut Recorder) {
    let seed = suite_seed(cfg, Suite::Codazzi);
    if let Some((m, a)) = &fx.codazzi {
        let pts = sample_points(m, cfg.grid.samples, seed);
        r.record("codazzi-residual", sampled_codazzi_residual(m, a, &pts, cfg.grid.pairs, seed));
    }
    if fx.cylinder.is_some() {
        return;
    }
    if let Some((wp, t)) = &fx.warped {
        let ids = ["codazzi5", "codazzi6", "codazzi7", "codazzi8", "codazzi9", "codazzi-blocks"];
        let (split, h) = match codazzi9_tensor(wp, t, seed) {
            Ok(x) => x,
            Err(e) => return r.fail_all(&ids, &e),
        };
        let m = wp.model();
        let pts = sample_points(&m, cfg.grid.samples, seed.wrapping_add(1));
        match check_bde_conditions(wp, &split, &pts, seed) {
            Ok(rep) => {
                r.record("codazzi5", Ok(rep.c5));
                r.record("codazzi6", Ok(rep.c6));
                r.record("codazzi7", Ok(rep.c7));
                r.record("codazzi8", Ok(rep.c8));
                r.record("codazzi9", sampled_codazzi_residual(&m, &h, &pts, cfg.grid.pairs, seed));
                r.record("codazzi-blocks", Ok(rep.reconstruction));
            }
            Err(e) => r.fail_all(&ids, &e),
        }
    }
}

fn cylinder_suite(fx: &Fixture, cfg: &SuiteConfig, r: &mut Recorder) {
    let cyl = fx.cylinder.as_ref().expect("cylinder fixture");
    let seed = suite_seed(cfg, Suite::Cylinder);
    for id in CylinderIdentity::ALL {
        r.record(id.id(), check_identity(cyl, id, cfg.grid.configurations, seed).map(|c| c.max_residual));
    }
}

fn holonomy_suite(fx: &Fixture, cfg: &SuiteConfig, r: &mut Recorder) {
    let opts = HolonomyOptions { seed: suite_seed(cfg, Suite::Holonomy), remote_points: cfg.grid.remote, ..HolonomyOptions::default() };
    let bp = &fx.basepoint;
    let est = match holonomy_both(&fx.model, bp, &opts) {
        Ok(e) => e,
        Err(e) => {
            let mut ids = vec!["holonomy-agree"];
            if fx.expected_holonomy.is_some() {
                ids.push("holonomy-dim");
            }
            return r.fail_all(&ids, &e);
        }
    };
    let agree = if est.loops.dimension == est.curvature.dimension && est.combined.dimension == est.loops.dimension {
        est.loops.span_distance(&est.curvature)
    } else {
        1.0
    };
    r.record("holonomy-agree", Ok(agree));
    if let Some(d) = fx.expected_holonomy {
        r.record("holonomy-dim", Ok((est.combined.dimension as f64 - d as f64).abs()));
    }
    let gap = est.loops.gap_ratio.min(est.curvature.gap_ratio).min(est.combined.gap_ratio);
    r.record("holonomy-gap", Ok(10.0 / gap));
    let trivial = est.combined.dimension == 0;
    if !trivial {
        r.record("holonomy-skew", Ok(est.loops.skew_residual.max(est.curvature.skew_residual)));
    }
    if let Some(cyl) = &fx.cylinder {
        let classified = (|| {
            let frame = AdaptedFrame { basis: adapted_basis(cyl, bp)?, factor_dims: fx.factor_dims.clone() };
            let p = p_field(cyl, bp)?;
            classify_blocks(&est.combined, &fx.model.metric(bp), Some(&p), Some(&frame))
        })();
        match classified {
            Ok(cl) => {
                // Nothing to test against an empty basis.
                let missing = if trivial { 0.0 } else { f64::INFINITY };
                r.record("holonomy-p-fixed", Ok(cl.p_residual.unwrap_or(missing)));
                if fx.expect_decomposable {
                    r.record("holonomy-decomposable", Ok(if cl.verdict == Verdict::Decomposable { 0.0 } else { 1.0 }));
                } else {
                    r.record("holonomy-pattern", Ok(cl.pattern_residual.unwrap_or(missing)));
                }
            }
            Err(e) => r.fail_all(&["holonomy-p-fixed"], &e),
        }
    }
}

fn killing_checks(ks: &KillingSpinor, samples: &[Vec<f64>], r: &mut Recorder, full: bool) {
    match check_warped_killing(ks, samples) {
        Ok(rep) => {
            r.record("killing", Ok(rep.killing_residual));
            if full {
                r.record("killing-recovery", Ok(rep.recovery_residual));
                r.record("killing-norm", Ok(rep.norm_profile_residual));
                r.record("killing-current", Ok(rep.current_residual));
            }
            r.record("killing-q", Ok(rep.q_max));
        }
        Err(e) => r.fail_all(&["killing"], &e),
    }
}

fn transfer_q(ks: &KillingSpinor, a: &EndomorphismField, samples: &[Vec<f64>]) -> Result<f64> {
    let t = phi_a_transfer(&ks.field, a)?;
    max_over(samples, |p| Ok((dirac_current(&ks.field, p)?.q_value - dirac_current(&t, p)?.q_value).abs()))
}

fn spinor_suite(fx: &Fixture, cfg: &SuiteConfig, r: &mut Recorder) {
    let seed = suite_seed(cfg, Suite::Spinor);
    let count = (cfg.grid.samples / 5).clamp(2, 8);
    let kopts = KillingOptions { seed, ..KillingOptions::default() };
    let wp = match (&fx.cylinder, &fx.warped) {
        (Some(c), _) => c.warped.clone(),
        (None, Some((wp, _))) => Some(wp.clone()),
        _ => None,
    };
    let Some(wp) = wp else { return };
    let x0 = &fx.fiber_point;
    let ks = match construct_warped_killing_spinor(&wp, None, x0, &kopts) {
        Ok(k) => k,
        Err(e) => return r.fail_all(&["killing"], &e),
    };
    let samples = local_samples(&ks.field.model, &with_root(x0), 0.3, count, seed);
    match &fx.cylinder {
        None => {
            killing_checks(&ks, &samples, r, true);
            r.record("ricci-constraint", ricci_constraint_residual(&wp.model(), &EndomorphismField::identity(wp.dim()), &samples));
            let t = &fx.warped.as_ref().expect("warped fixture").1;
            let h = constant_b_split(&wp, t, 1.0).assemble(&wp);
            r.record("transfer-q", transfer_q(&ks, &h, &samples));
        }
        Some(cyl) => {
            killing_checks(&ks, &samples, r, false);
            r.record("transfer-q", transfer_q(&ks, &cyl.h, &samples));
            lift_checks(cyl, &ks, x0, seed, r);
            let g0 = pullback_model(&cyl.base, &cyl.h);
            let pts = local_samples(&g0, &with_root(x0), 0.3, 2, seed);
            r.record("ricci-constraint", ricci_constraint_residual(&g0, &cyl.h.inverse(), &pts));
        }
    }
}

fn lift_checks(cyl: &CylinderModel, ks: &KillingSpinor, x0: &[f64], seed: u64, r: &mut Recorder) {
    let ids = ["lift-parallel", "lift-norm", "lift-current", "lift-slice"];
    let lifted = phi_a_transfer(&ks.field, &cyl.h).and_then(|t| lift_to_cylinder(cyl, &t, &LiftOptions { seed, ..LiftOptions::default() }));
    match lifted {
        Ok((ls, rep)) => {
            r.record("lift-parallel", Ok(rep.parallel_residual));
            r.record("lift-norm", Ok(rep.norm_residual));
            r.record("lift-current", Ok(rep.current_parallel_residual));
            r.record("lift-slice", ls.slice_identity_residual(&with_root(x0)));
        }
        Err(e) => r.fail_all(&ids, &e),
    }
}

fn causality_suite(fx: &Fixture, cfg: &SuiteConfig, r: &mut Recorder) {
    let cyl = fx.cylinder.as_ref().expect("cylinder fixture");
    let seed = suite_seed(cfg, Suite::Causality);
    let grid = CausalityGrid::for_cylinder(cyl, cfg.grid.slices, 3, cfg.grid.samples, seed);
    let rep = causality_bounds(cyl, &grid, true);
    if fx.name == "cylinder-torus-id" {
        // Relative to the closed forms, which grow like (1 − 2t)⁻¹.
        let gh = rep.slices.iter().map(|s| (s.gh * (1.0 - 2.0 * s.t) - 1.0).abs()).fold(0.0, f64::max);
        let bbc = rep.slices.iter().map(|s| (s.bbc * (1.0 - 2.0 * s.t) / 4.0 - 1.0).abs()).fold(0.0, f64::max);
        r.record("causality-gh-closed", Ok(gh));
        r.record("causality-bbc-closed", Ok(bbc));
    }
    let ratio = |ok: bool, b: f64| if ok { b / BOUND_CEILING } else { f64::INFINITY };
    r.record("causality-gh-finite", Ok(ratio(rep.gh_established, rep.gh_bound)));
    r.record("causality-bbc-finite", Ok(ratio(rep.bbc_established, rep.bbc_bound)));
}

fn obstruction_suite(fx: &Fixture, cfg: &SuiteConfig, r: &mut Recorder) {
    let eh = fx.eh.as_ref().expect("Eguchi-Hanson fixture").clone().with_gamma_offset(0.0);
    let seed = suite_seed(cfg, Suite::EhObstruction);
    match eh_codazzi_obstruction(&eh, cfg.grid.obstruction) {
        Ok(rep) => {
            r.record("obstruction-dim", Ok((rep.solution_dim as f64 - 1.0).abs()));
            r.record("obstruction-stable", Ok((rep.solution_dim as f64 - rep.solution_dim_refined as f64).abs()));
            r.record("obstruction-identity", Ok(rep.identity_defect));
            r.record("obstruction-homothetic", Ok(1e-3 / rep.homothetic_sigma_min));
            r.record("obstruction-steps", Ok(rep.steps.iter().map(|s| s.residual).fold(0.0, f64::max)));
        }
        Err(e @ Error::GridTooCoarse { coarse, fine }) => {
            r.record("obstruction-dim", Ok((coarse as f64 - 1.0).abs()));
            r.record("obstruction-stable", Ok((coarse as f64 - fine as f64).abs()));
            r.errors.push(format!("obstruction: {e}"));
        }
        Err(e) => r.fail_all(&["obstruction-dim", "obstruction-stable"], &e),
    }
    r.record("obstruction-averaging", averaging_check(&eh, 1.8 * eh.a, seed).map(|c| c.commutation));
}

fn run_suite(fx: &Fixture, cfg: &SuiteConfig, suite: Suite) -> SuiteReport {
    let start = Instant::now();
    let mut r = Recorder::new(cfg);
    match suite {
        Suite::Connection => connection_suite(fx, cfg, &mut r),
        Suite::Curvature => curvature_suite(fx, cfg, &mut r),
        Suite::Codazzi => codazzi_suite(fx, cfg, &mut r),
        Suite::Cylinder => cylinder_suite(fx, cfg, &mut r),
        Suite::Holonomy => holonomy_suite(fx, cfg, &mut r),
        Suite::Spinor => spinor_suite(fx, cfg, &mut r),
        Suite::Causality => causality_suite(fx, cfg, &mut r),
        Suite::EhObstruction => obstruction_suite(fx, cfg, &mut r),
    }
    SuiteReport { suite, checks: r.checks, errors: r.errors, seconds: start.elapsed().as_secs_f64() }
}

/// Builds the fixture and runs the configured suites in parallel. Only
/// configuration and fixture problems are returned as errors; failures
/// inside a check are recorded in the report.
pub fn run(cfg: &SuiteConfig) -> Result<Report> {
    let start = Instant::now();
    let suites = cfg.effective_suites()?;
    let fx = build_fixture(cfg)?;
    let reports: Vec<SuiteReport> = suites.par_iter().map(|&s| run_suite(&fx, cfg, s)).collect();
    Ok(Report {
        fixture: cfg.fixture.clone(),
        params: cfg.params.clone(),
        suites: reports,
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        grid: cfg.grid.clone(),
        total_seconds: start.elapsed().as_secs_f64(),
    })
}
