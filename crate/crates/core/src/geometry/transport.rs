//! Parallel transport by fixed-step RK4 on the propagator equation
//! dT/dr = −Γ(ẋ)·T, with a Richardson estimate from the half-step run.

use super::connection::christoffel_unchecked;
use super::curve::{CurvePath, CurvePiece};
use super::model::ManifoldModel;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct TransportOptions {
    /// Steps per unit of coordinate length of each piece.
    pub steps_per_unit: f64,
    /// Floor on the step count of a piece; must be even.
    pub min_steps: usize,
    /// Upper limit before `StepUnderflow` is raised.
    pub max_steps: usize,
    /// Accepted Richardson error estimate (max-abs entry of the propagator).
    pub tol: f64,
}

impl Default for TransportOptions {
    fn default() -> Self {
        TransportOptions { steps_per_unit: 1000.0, min_steps: 32, max_steps: 1 << 17, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportResult {
    /// Propagator mapping chart components at the start to the end.
    pub matrix: DMatrix<f64>,
    pub error_estimate: f64,
    pub steps: usize,
}

/// Tangent vector with its basepoint, in chart components.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub basepoint: Vec<f64>,
    pub components: DVector<f64>,
}

impl TangentVector {
    pub fn new(basepoint: &[f64], components: DVector<f64>) -> Self {
        TangentVector { basepoint: basepoint.to_vec(), components }
    }
}

/// Propagator of parallel transport along the whole curve.
pub fn transport_matrix(model: &ManifoldModel, curve: &CurvePath, opts: &TransportOptions) -> Result<TransportResult> {
    let n = model.dim;
    let mut total = DMatrix::<f64>::identity(n, n);
    let mut err = 0.0;
    let mut steps = 0;
    for piece in &curve.pieces {
        let r = transport_piece(model, piece, opts)?;
        total = &r.matrix * total;
        err += r.error_estimate;
        steps += r.steps;
    }
    Ok(TransportResult { matrix: total, error_estimate: err, steps })
}

/// Transport of a single vector, with the isometry check applied.
pub fn parallel_transport(model: &ManifoldModel, curve: &CurvePath, v0: &TangentVector) -> Result<TangentVector> {
    parallel_transport_with(model, curve, v0, &TransportOptions::default())
}

pub fn parallel_transport_with(
    model: &ManifoldModel,
    curve: &CurvePath,
    v0: &TangentVector,
    opts: &TransportOptions,
) -> Result<TangentVector> {
    let start = curve.start();
    let gap = (&start - DVector::from_column_slice(&v0.basepoint)).amax();
    if gap > 1e-10 {
        return Err(Error::OutOfChart { point: v0.basepoint.clone(), margin: -gap });
    }
    let t = transport_matrix(model, curve, opts)?;
    let end = curve.end();
    Ok(TangentVector::new(end.as_slice(), &t.matrix * &v0.components))
}

/// Defect |g(τv,τv) − g(v,v)| / (1 + |g(v,v)|) over the columns of the
/// propagator, i.e. how far it is from an isometry.
pub fn isometry_defect(model: &ManifoldModel, curve: &CurvePath, t: &DMatrix<f64>) -> f64 {
    let g0 = model.metric(curve.start().as_slice());
    let g1 = model.metric(curve.end().as_slice());
    let pulled = t.transpose() * g1 * t;
    let scale = 1.0 + g0.amax();
    (pulled - g0).amax() / scale
}

fn transport_piece(model: &ManifoldModel, piece: &CurvePiece, opts: &TransportOptions) -> Result<TransportResult> {
    let n = model.dim;
    let mut steps = ((opts.steps_per_unit * piece.length).ceil() as usize).max(opts.min_steps);
    steps += steps % 2;
    loop {
        // Generators A(r) = −Γ(ẋ(r)) on the half-step grid r_j = j/(2N).
        let nodes = 2 * steps + 1;
        let mut gen = Vec::with_capacity(nodes);
        for j in 0..nodes {
            let r = j as f64 / (2 * steps) as f64;
            let x = (piece.position)(r);
            model.check_point(x.as_slice(), 2.0)?;
            let v = (piece.velocity)(r);
            let gam = christoffel_unchecked(model, x.as_slice())?;
            gen.push(-gam.along(&v));
        }
        let fine = rk4_on_grid(&gen, steps, 1, n);
        let coarse = rk4_on_grid(&gen, steps / 2, 2, n);
        let est = (&fine - &coarse).amax() / 15.0;
        if est <= opts.tol {
            return Ok(TransportResult { matrix: fine, error_estimate: est, steps });
        }
        if 2 * steps > opts.max_steps {
            return Err(Error::StepUnderflow { estimate: est, tol: opts.tol, steps });
        }
        steps *= 2;
    }
}

/// RK4 for dT/dr = A(r) T with A sampled on a grid of 2N+1 half-step nodes.
/// `stride` = 1 uses all N steps; `stride` = 2 uses N/2 double steps whose
/// midpoints are the even-index nodes.
fn rk4_on_grid(gen: &[DMatrix<f64>], steps: usize, stride: usize, n: usize) -> DMatrix<f64> {
    let total = gen.len() - 1;
    let dt = 1.0 / steps as f64;
    let mut t = DMatrix::<f64>::identity(n, n);
    for s in 0..steps {
        let i0 = 2 * stride * s;
        let im = i0 + stride;
        let i1 = i0 + 2 * stride;
        debug_assert!(i1 <= total);
        let a0 = &gen[i0];
        let am = &gen[im];
        let a1 = &gen[i1];
        let k1 = a0 * &t;
        let k2 = am * (&t + &k1 * (0.5 * dt));
        let k3 = am * (&t + &k2 * (0.5 * dt));
        let k4 = a1 * (&t + &k3 * dt);
        t += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    t
}

/// Generic RK4 driver for linear systems y' = F(r) y where `F` is
/// evaluated on the fly; used by integrators that carry extra state.
pub fn rk4_linear<F>(y0: DVector<f64>, steps: usize, mut f: F) -> Result<DVector<f64>>
where
    F: FnMut(f64, &DVector<f64>) -> Result<DVector<f64>>,
{
    let dt = 1.0 / steps as f64;
    let mut y = y0;
    for s in 0..steps {
        let r = s as f64 * dt;
        let k1 = f(r, &y)?;
        let k2 = f(r + 0.5 * dt, &(&y + &k1 * (0.5 * dt)))?;
        let k3 = f(r + 0.5 * dt, &(&y + &k2 * (0.5 * dt)))?;
        let k4 = f(r + dt, &(&y + &k3 * dt))?;
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    Ok(y)
}
