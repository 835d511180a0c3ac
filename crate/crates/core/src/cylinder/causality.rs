//! Sampled causality bounds of a Lorentzian cylinder −dt² + g_t.

use super::model::CylinderModel;
use crate::linalg::generalized_sym_eigenvalues;
use crate::sampling;
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Values above this count as unbounded.
pub const BOUND_CEILING: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct CausalityGrid {
    pub t_values: Vec<f64>,
    /// Base points.
    pub points: Vec<Vec<f64>>,
}

impl CausalityGrid {
    /// `t_count` evenly spaced slices over the cylinder's t window and a base
    /// lattice plus seeded random points.
    pub fn for_cylinder(cyl: &CylinderModel, t_count: usize, per_axis: usize, random: usize, seed: u64) -> Self {
        let (lo, hi) = cyl.t_window;
        let t_values = (0..t_count)
            .map(|k| if t_count == 1 { 0.0 } else { lo + (hi - lo) * k as f64 / (t_count - 1) as f64 })
            .collect();
        let mut points = sampling::lattice(&cyl.base.chart, 0.02, per_axis, 4096);
        let mut rng = sampling::rng(seed);
        points.extend(sampling::random_points(&mut rng, &cyl.base.chart, 0.02, random));
        CausalityGrid { t_values, points }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceBound {
    pub t: f64,
    /// sup over the slice of the eigenvalues of A_t⁻¹, g_t = A_t^* g_0.
    pub gh: f64,
    /// sup over the slice of |eigenvalues of ġ_t ∘ g_t⁻¹|.
    pub bbc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalityReport {
    /// t is a time function, so every cylinder is strongly causal.
    pub strongly_causal: bool,
    pub slices: Vec<SliceBound>,
    pub gh_bound: f64,
    pub bbc_bound: f64,
    /// Completeness of g_0, asserted by the caller.
    pub complete: bool,
    pub gh_established: bool,
    pub bbc_established: bool,
}

impl CausalityReport {
    pub fn globally_hyperbolic(&self) -> bool {
        self.complete && self.gh_established
    }

    pub fn bbc(&self) -> bool {
        self.globally_hyperbolic() && self.bbc_established
    }

    pub fn verdict(&self) -> &'static str {
        if self.bbc() {
            "globally hyperbolic, bbc"
        } else if self.globally_hyperbolic() {
            "globally hyperbolic; bbc bound not established"
        } else if !self.complete {
            "strongly causal; completeness not asserted"
        } else {
            "strongly causal; bound not established"
        }
    }
}

fn finite(x: f64) -> bool {
    x.is_finite() && x < BOUND_CEILING
}

/// Bounds for an arbitrary family: `slice(t, p)` returns (g_t, ġ_t) and
/// `g0(p)` the metric at t = 0.
pub fn causality_bounds_general<S, G>(slice: S, g0: G, grid: &CausalityGrid, complete: bool) -> CausalityReport
where
    S: Fn(f64, &[f64]) -> (DMatrix<f64>, DMatrix<f64>) + Sync,
    G: Fn(&[f64]) -> DMatrix<f64> + Sync,
{
    let g0s: Vec<DMatrix<f64>> = grid.points.par_iter().map(|p| g0(p)).collect();
    let slices: Vec<SliceBound> = grid
        .t_values
        .par_iter()
        .map(|&t| {
            let mut gh = 0.0_f64;
            let mut bbc = 0.0_f64;
            for (p, g0p) in grid.points.iter().zip(&g0s) {
                let (gt, gdot) = slice(t, p);
                // Eigenvalues of g_t relative to g_0 are the squares of those of A_t.
                match generalized_sym_eigenvalues(&gt, g0p) {
                    Some(ev) => {
                        for l in ev {
                            gh = gh.max(if l > 0.0 { 1.0 / l.sqrt() } else { f64::INFINITY });
                        }
                    }
                    None => gh = f64::INFINITY,
                }
                match generalized_sym_eigenvalues(&gdot, &gt) {
                    Some(ev) => {
                        for l in ev {
                            bbc = bbc.max(l.abs());
                        }
                    }
                    None => bbc = f64::INFINITY,
                }
            }
            SliceBound { t, gh, bbc }
        })
        .collect();
    let gh_bound = slices.iter().map(|s| s.gh).fold(0.0, f64::max);
    let bbc_bound = slices.iter().map(|s| s.bbc).fold(0.0, f64::max);
    CausalityReport {
        strongly_causal: true,
        gh_established: slices.iter().all(|s| finite(s.gh)),
        bbc_established: slices.iter().all(|s| finite(s.bbc)),
        slices,
        gh_bound,
        bbc_bound,
        complete,
    }
}

pub fn causality_bounds(cyl: &CylinderModel, grid: &CausalityGrid, complete: bool) -> CausalityReport {
    causality_bounds_general(
        |t, p| (cyl.slice_metric(t, p), cyl.slice_metric_dot(t, p)),
        |p| cyl.slice_metric(0.0, p),
        grid,
        complete,
    )
}
