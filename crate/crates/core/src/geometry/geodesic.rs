//! Geodesics by RK4 on (x, ẋ) and a C¹ Hermite curve through the samples.

use super::connection::christoffel_unchecked;
use super::curve::{CurvePath, CurvePiece};
use super::model::ManifoldModel;
use crate::error::Result;
use nalgebra::DVector;
use std::sync::Arc;

/// Samples of the geodesic with x(0) = x0, ẋ(0) = v0 on r ∈ [0, 1].
pub fn geodesic(model: &ManifoldModel, x0: &[f64], v0: &DVector<f64>, steps: usize) -> Result<(Vec<DVector<f64>>, Vec<DVector<f64>>)> {
    let n = model.dim;
    let rhs = |x: &DVector<f64>, v: &DVector<f64>| -> Result<(DVector<f64>, DVector<f64>)> {
        model.check_point(x.as_slice(), 2.0)?;
        let gam = christoffel_unchecked(model, x.as_slice())?;
        Ok((v.clone(), -gam.contract(v, v)))
    };
    let dt = 1.0 / steps as f64;
    let mut x = DVector::from_column_slice(x0);
    let mut v = v0.clone();
    assert_eq!(v.len(), n);
    let mut xs = vec![x.clone()];
    let mut vs = vec![v.clone()];
    for _ in 0..steps {
        let (k1x, k1v) = rhs(&x, &v)?;
        let (k2x, k2v) = rhs(&(&x + &k1x * (0.5 * dt)), &(&v + &k1v * (0.5 * dt)))?;
        let (k3x, k3v) = rhs(&(&x + &k2x * (0.5 * dt)), &(&v + &k2v * (0.5 * dt)))?;
        let (k4x, k4v) = rhs(&(&x + &k3x * dt), &(&v + &k3v * dt))?;
        x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (dt / 6.0);
        v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (dt / 6.0);
        xs.push(x.clone());
        vs.push(v.clone());
    }
    Ok((xs, vs))
}

impl CurvePath {
    /// Piecewise cubic Hermite curve through equally spaced samples on
    /// [0, 1] with prescribed velocities (a single piece).
    pub fn hermite(xs: Vec<DVector<f64>>, vs: Vec<DVector<f64>>) -> CurvePath {
        assert!(xs.len() >= 2 && xs.len() == vs.len());
        let m = xs.len() - 1;
        let length: f64 = xs.windows(2).map(|w| (&w[1] - &w[0]).norm()).sum();
        let xs = Arc::new(xs);
        let vs = Arc::new(vs);
        let locate = move |r: f64| {
            let u = r.clamp(0.0, 1.0) * m as f64;
            let k = (u.floor() as usize).min(m - 1);
            (k, u - k as f64)
        };
        let h = 1.0 / m as f64;
        let (xa, va) = (xs.clone(), vs.clone());
        let position = Arc::new(move |r: f64| {
            let (k, s) = locate(r);
            let (s2, s3) = (s * s, s * s * s);
            &xa[k] * (2.0 * s3 - 3.0 * s2 + 1.0) + &va[k] * ((s3 - 2.0 * s2 + s) * h) + &xa[k + 1] * (-2.0 * s3 + 3.0 * s2)
                + &va[k + 1] * ((s3 - s2) * h)
        });
        let velocity = Arc::new(move |r: f64| {
            let (k, s) = locate(r);
            let s2 = s * s;
            (&xs[k] * (6.0 * s2 - 6.0 * s) + &xs[k + 1] * (-6.0 * s2 + 6.0 * s)) / h
                + &vs[k] * (3.0 * s2 - 4.0 * s + 1.0)
                + &vs[k + 1] * (3.0 * s2 - 2.0 * s)
        });
        CurvePath { pieces: vec![CurvePiece { position, velocity, length }], closed: false }
    }
}
