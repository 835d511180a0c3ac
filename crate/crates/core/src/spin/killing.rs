//! Imaginary Killing spinors on ℝ ×_{e^{-2s}} F built from parallel fiber
//! spinors, and the Ricci constraint of Codazzi spinors.

use super::clifford::{cnorm, CMat, CVec, Parity, SpinorModule, C64, I};
use super::connection::{frame_one_form, model_frame, spin_lift};
use super::current::dirac_current;
use super::field::{codazzi_spinor_residual, integrate_codazzi_spinor, IntegrationOptions, IntegrationTree, SpinorField};
use crate::error::{Error, Result};
use crate::geometry::{riemann, ManifoldModel};
use crate::linalg::null_space;
use crate::sampling;
use crate::warped::{EndomorphismField, WarpedProductModel};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct KillingOptions {
    /// Largest accepted |Ω^F φ| for a supplied or computed fiber spinor.
    pub fiber_tol: f64,
    /// Extra random fiber points for the parallel-spinor search.
    pub fiber_points: usize,
    pub integration: IntegrationOptions,
    pub seed: u64,
}

impl Default for KillingOptions {
    fn default() -> Self {
        KillingOptions { fiber_tol: 1e-8, fiber_points: 4, integration: IntegrationOptions::default(), seed: 3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KillingReport {
    pub killing_residual: f64,
    pub recovery_residual: f64,
    /// max |‖ψ‖² e^{2s} − 1|.
    pub norm_profile_residual: f64,
    /// max |W + e^{-2s}∂_s| e^{2s}.
    pub current_residual: f64,
    pub q_max: f64,
    pub samples: usize,
}

#[derive(Debug, Clone)]
pub struct KillingSpinor {
    pub field: SpinorField,
    pub tree: IntegrationTree,
    /// Components at the root (0, x₀), unit norm.
    pub phi0: CVec,
    pub fiber_parallel_residual: f64,
}

/// Fiber spin connection Ω^F(e^F_a) embedded in Δ_{1,n} through κ_1..κ_{n−1}.
fn fiber_connections(module: &SpinorModule, fiber: &ManifoldModel, x: &[f64]) -> Result<Vec<CMat>> {
    let frame = model_frame(fiber)?;
    let m = fiber.dim;
    let e = frame(x);
    let eta = vec![1.0; m + 1];
    (0..m)
        .map(|a| {
            let wf = frame_one_form(fiber, &frame, x, &e.column(a).into_owned())?;
            let mut w = DMatrix::zeros(m + 1, m + 1);
            w.view_mut((1, 1), (m, m)).copy_from(&wf);
            Ok(spin_lift(&module.kappas, &eta, &w))
        })
        .collect()
}

fn stack(blocks: &[CMat]) -> DMatrix<f64> {
    // Realify: [Re −Im; Im Re] per block, stacked vertically.
    let d = blocks[0].ncols();
    let mut out = DMatrix::zeros(2 * d * blocks.len(), 2 * d);
    for (b, m) in blocks.iter().enumerate() {
        let r0 = 2 * d * b;
        for i in 0..d {
            for j in 0..d {
                let z = m[(i, j)];
                out[(r0 + i, j)] = z.re;
                out[(r0 + i, d + j)] = -z.im;
                out[(r0 + d + i, j)] = z.im;
                out[(r0 + d + i, d + j)] = z.re;
            }
        }
    }
    out
}

fn complexify(v: &DVector<f64>) -> CVec {
    let d = v.len() / 2;
    CVec::from_fn(d, |i, _| C64::new(v[i], v[d + i]))
}

/// Unit spinor φ with Ω^F φ = 0 at the fiber points, κ₀φ = iφ and a definite
/// parity when n is odd (Δ⁺ preferred).
pub fn fiber_parallel_spinor(module: &SpinorModule, fiber: &ManifoldModel, points: &[Vec<f64>]) -> Result<(CVec, Parity)> {
    let mut blocks = Vec::new();
    for x in points {
        blocks.extend(fiber_connections(module, fiber, x)?);
    }
    blocks.push(&module.kappas[0] - module.rep.identity() * I);
    let parities = if module.n() % 2 == 1 { vec![Parity::Plus, Parity::Minus] } else { vec![Parity::Full] };
    let mut best = f64::INFINITY;
    for parity in parities {
        let mut bl = blocks.clone();
        if parity != Parity::Full {
            bl.push(module.rep.identity() - module.parity_projector(parity));
        }
        let m = stack(&bl);
        let ns = null_space(&m, 1e-6);
        if ns.ncols() > 0 {
            let phi = complexify(&ns.column(0).into_owned());
            let phi = &phi * C64::new(1.0 / cnorm(&phi), 0.0);
            return Ok((phi, parity));
        }
        let sv = m.singular_values();
        best = best.min(sv.min());
    }
    Err(Error::NonParallelFiber { residual: best })
}

/// max_a |Ω^F(e_a)φ| / |φ| over the fiber points.
pub fn fiber_parallel_residual(module: &SpinorModule, fiber: &ManifoldModel, phi: &CVec, points: &[Vec<f64>]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for x in points {
        for om in fiber_connections(module, fiber, x)? {
            worst = worst.max(cnorm(&(om * phi)) / cnorm(phi));
        }
    }
    Ok(worst)
}

/// Random points within `half_width` of `center`, clipped to the chart.
pub fn local_samples(model: &ManifoldModel, center: &[f64], half_width: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = sampling::rng(seed);
    let chart = model.chart.shrunk(0.02);
    (0..count)
        .map(|_| {
            let d = sampling::random_vector(&mut rng, center.len());
            (0..center.len()).map(|k| (center[k] + half_width * d[k]).clamp(chart.lo[k], chart.hi[k])).collect()
        })
        .collect()
}

/// ψ = e^{-s}φ with φ a parallel fiber spinor in the κ₀ = i eigenspace,
/// obtained by integrating ∇ − i·Id⋆ from (0, x₀). Without `phi_f` the
/// fiber spinor is searched for as a common kernel of Ω^F on sampled points.
pub fn construct_warped_killing_spinor(wp: &WarpedProductModel, phi_f: Option<CVec>, x0: &[f64], opts: &KillingOptions) -> Result<KillingSpinor> {
    let n = wp.dim();
    let module = Arc::new(SpinorModule::new(n)?);
    let model = wp.model();
    let frame = model_frame(&model)?;
    let mut fpts = vec![x0.to_vec()];
    fpts.extend(local_samples(&wp.fiber, x0, 0.4, opts.fiber_points, opts.seed));
    let (phi, parity) = match phi_f {
        Some(v) => {
            let res = fiber_parallel_residual(&module, &wp.fiber, &v, &fpts)?;
            if res > opts.fiber_tol {
                return Err(Error::NonParallelFiber { residual: res });
            }
            let proj = (module.rep.identity() - &module.kappas[0] * I) * C64::new(0.5, 0.0);
            let w = proj * v;
            let norm = cnorm(&w);
            if norm < 1e-8 {
                return Err(Error::NonParallelFiber { residual: norm });
            }
            let parity = if n % 2 == 1 {
                let plus = module.parity_projector(Parity::Plus);
                if cnorm(&(&plus * &w - &w)) < 1e-10 {
                    Parity::Plus
                } else if cnorm(&(&plus * &w)) < 1e-10 {
                    Parity::Minus
                } else {
                    Parity::Full
                }
            } else {
                Parity::Full
            };
            (&w * C64::new(1.0 / norm, 0.0), parity)
        }
        None => fiber_parallel_spinor(&module, &wp.fiber, &fpts)?,
    };
    let fiber_res = fiber_parallel_residual(&module, &wp.fiber, &phi, &fpts)?;
    let mut root = vec![0.0];
    root.extend(x0);
    let (field, tree) =
        integrate_codazzi_spinor(&model, &frame, module, &EndomorphismField::identity(n), &root, phi.clone(), parity, &opts.integration)?;
    Ok(KillingSpinor { field, tree, phi0: phi, fiber_parallel_residual: fiber_res })
}

/// Killing residual and the norm, current and q profiles at `samples`.
pub fn check_warped_killing(ks: &KillingSpinor, samples: &[Vec<f64>]) -> Result<KillingReport> {
    let n = ks.field.model.dim;
    let cod = codazzi_spinor_residual(&ks.field, &EndomorphismField::identity(n), samples)?;
    let per: Vec<(f64, f64, f64)> = samples
        .par_iter()
        .map(|p| {
            let c = dirac_current(&ks.field, p)?;
            let e2s = (2.0 * p[0]).exp();
            let mut expect = DVector::zeros(n);
            expect[0] = -1.0 / e2s;
            Ok(((c.norm_sq * e2s - 1.0).abs(), (&c.w - expect).amax() * e2s, c.q_value.abs()))
        })
        .collect::<Result<_>>()?;
    Ok(KillingReport {
        killing_residual: cod.residual,
        recovery_residual: cod.recovery_residual,
        norm_profile_residual: per.iter().map(|x| x.0).fold(0.0, f64::max),
        current_residual: per.iter().map(|x| x.1).fold(0.0, f64::max),
        q_max: per.iter().map(|x| x.2).fold(0.0, f64::max),
        samples: samples.len(),
    })
}

/// max over points of |Ric − 4A² + 4(tr A)A|, the curvature condition a
/// Codazzi spinor with tensor A imposes.
pub fn ricci_constraint_residual(model: &ManifoldModel, a: &EndomorphismField, points: &[Vec<f64>]) -> Result<f64> {
    let res: Vec<f64> = points
        .par_iter()
        .map(|p| {
            let ric = riemann(model, p)?.ricci_endomorphism();
            let am = a.at(p);
            let expect = &am * &am * 4.0 - &am * (4.0 * am.trace());
            Ok((ric - expect).amax())
        })
        .collect::<Result<_>>()?;
    Ok(res.into_iter().fold(0.0, f64::max))
}
