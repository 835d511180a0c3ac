//! Spin connection and spinor curvature from an orthonormal frame.

use super::clifford::{CMat, SpinorModule, C64};
use crate::error::{Error, Result};
use crate::geometry::{christoffel, directional_derivative_mat, riemann, ManifoldModel, MatrixField};
use nalgebra::{DMatrix, DVector};

/// Frame of the model, or `MissingFrame`.
pub fn model_frame(model: &ManifoldModel) -> Result<MatrixField> {
    model.frame().map(|f| f.vectors.clone()).ok_or(Error::MissingFrame)
}

/// ω[(a, b)] = g(∇_x e_a, e_b) for a frame given as coordinate columns.
pub fn frame_one_form(model: &ManifoldModel, frame: &MatrixField, p: &[f64], x: &DVector<f64>) -> Result<DMatrix<f64>> {
    let gam = christoffel(model, p)?;
    let n = model.dim;
    let e = frame(p);
    let g = model.metric(p);
    let de = directional_derivative_mat(model, p, x, &|q| frame(q));
    let nab = de + gam.along(x) * &e;
    let ge = &g * &e;
    Ok(DMatrix::from_fn(n, n, |a, b| nab.column(a).dot(&ge.column(b))))
}

/// Image of an η-skew frame endomorphism w in the Clifford algebra:
/// ½ Σ_{a<b} η_a η_b w_ab γ_aγ_b, which satisfies [Ω, γ_m] = Σ_b η_b w_mb γ_b.
pub fn spin_lift(gens: &[CMat], eta: &[f64], w: &DMatrix<f64>) -> CMat {
    let d = gens[0].nrows();
    let mut out = CMat::zeros(d, d);
    for a in 0..gens.len() {
        for b in a + 1..gens.len() {
            let c = 0.5 * eta[a] * eta[b] * w[(a, b)];
            if c != 0.0 {
                out += &gens[a] * &gens[b] * C64::new(c, 0.0);
            }
        }
    }
    out
}

/// Connection matrix Ω(x) of the spinor bundle of a Riemannian model in the
/// given frame, so that ∇_xψ = x(ψ) + Ω(x)ψ on frame components.
pub fn spin_connection(module: &SpinorModule, model: &ManifoldModel, frame: &MatrixField, p: &[f64], x: &DVector<f64>) -> Result<CMat> {
    let w = frame_one_form(model, frame, p, x)?;
    Ok(spin_lift(&module.kappas, &vec![1.0; module.n()], &w))
}

/// R^S(x, y) = ½ Σ_{j<k} g(R(x,y)e_j, e_k) e_j⋆e_k⋆.
pub fn spinor_curvature(module: &SpinorModule, model: &ManifoldModel, frame: &MatrixField, p: &[f64], x: &DVector<f64>, y: &DVector<f64>) -> Result<CMat> {
    let r = riemann(model, p)?.endomorphism(x, y);
    let e = frame(p);
    let g = model.metric(p);
    let w = (&r * &e).transpose() * &g * &e;
    Ok(spin_lift(&module.kappas, &vec![1.0; module.n()], &w))
}

/// Curvature of the spin connection itself on coordinate fields,
/// ∂_iΩ_j − ∂_jΩ_i + [Ω_i, Ω_j], by finite differences.
pub fn spin_connection_curvature_fd(module: &SpinorModule, model: &ManifoldModel, frame: &MatrixField, p: &[f64], i: usize, j: usize) -> Result<CMat> {
    let n = model.dim;
    let axis = |k: usize| DVector::from_fn(n, |r, _| if r == k { 1.0 } else { 0.0 });
    let omega = |q: &[f64], k: usize| spin_connection(module, model, frame, q, &axis(k));
    let d = |k: usize, l: usize| -> Result<CMat> {
        let h = model.fd.h2(k);
        let mut q = p.to_vec();
        let mut acc = CMat::zeros(module.module_dim(), module.module_dim());
        for (off, c) in [(2.0, -1.0), (1.0, 8.0), (-1.0, -8.0), (-2.0, 1.0)] {
            q[k] = p[k] + off * h;
            acc += omega(&q, l)? * C64::new(c / (12.0 * h), 0.0);
        }
        Ok(acc)
    };
    let oi = omega(p, i)?;
    let oj = omega(p, j)?;
    Ok(d(i, j)? - d(j, i)? + &oi * &oj - &oj * &oi)
}
