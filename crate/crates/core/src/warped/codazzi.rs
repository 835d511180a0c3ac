//! The Codazzi equation d^∇A = 0 and checks built on it.

use super::endo::{endo_norm, vec_norm, EndomorphismField};
use crate::error::{Error, Result};
use crate::geometry::{central_difference, christoffel, riemann, ManifoldModel};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// Tolerance on relative asymmetry before a field is rejected.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// ∇A at a point: `nabla[i]` = ∇_{∂_i}A = ∂_iA + Γ_i A − A Γ_i.
#[derive(Debug, Clone)]
pub struct CovariantEndo {
    pub point: Vec<f64>,
    pub value: DMatrix<f64>,
    pub nabla: Vec<DMatrix<f64>>,
    pub metric: DMatrix<f64>,
}

impl CovariantEndo {
    /// (∇_X A)(Y).
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(y.len());
        for (i, m) in self.nabla.iter().enumerate() {
            if x[i] != 0.0 {
                out += m * y * x[i];
            }
        }
        out
    }

    /// (d^∇A)(X, Y) = (∇_X A)Y − (∇_Y A)X.
    pub fn exterior(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.apply(x, y) - self.apply(y, x)
    }

    pub fn residual(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        vec_norm(&self.metric, &self.exterior(x, y))
    }

    /// Largest residual over pairs of a g-orthonormal basis.
    pub fn max_residual(&self) -> f64 {
        let basis = orthonormal_basis(&self.metric);
        let n = basis.ncols();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i + 1..n {
                let x = basis.column(i).into_owned();
                let y = basis.column(j).into_owned();
                worst = worst.max(self.residual(&x, &y));
            }
        }
        worst
    }
}

/// Columns form a g-orthonormal basis (Riemannian g) or a g-orthogonal
/// basis with |g(e,e)| = 1 (indefinite g).
pub fn orthonormal_basis(g: &DMatrix<f64>) -> DMatrix<f64> {
    match g.clone().cholesky() {
        Some(ch) => ch.l().transpose().try_inverse().unwrap(),
        None => {
            let eig = super::super::linalg::symmetrize(g).symmetric_eigen();
            let mut b = eig.eigenvectors.clone();
            for j in 0..b.ncols() {
                let s = eig.eigenvalues[j].abs().sqrt();
                let mut c = b.column_mut(j);
                c /= s;
            }
            b
        }
    }
}

pub fn covariant_endo(model: &ManifoldModel, a: &EndomorphismField, p: &[f64]) -> Result<CovariantEndo> {
    let gam = christoffel(model, p)?;
    let value = a.at(p);
    let n = model.dim;
    let nabla = (0..n)
        .map(|i| {
            let da = central_difference(|q| a.at(q), p, i, model.fd.h(i));
            let gi = gam.axis(i);
            da + &gi * &value - &value * &gi
        })
        .collect();
    Ok(CovariantEndo { point: p.to_vec(), value, nabla, metric: model.metric(p) })
}

/// ‖(∇_X A)(Y) − (∇_Y A)(X)‖_g at `p`.
pub fn codazzi_residual(model: &ManifoldModel, a: &EndomorphismField, p: &[f64], x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    a.check_symmetric(model, p, SYMMETRY_TOL)?;
    Ok(covariant_endo(model, a, p)?.residual(x, y))
}

/// Largest orthonormal-pair residual over a point set.
pub fn max_codazzi_residual(model: &ManifoldModel, a: &EndomorphismField, points: &[Vec<f64>]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for p in points {
        a.check_symmetric(model, p, SYMMETRY_TOL)?;
        worst = worst.max(covariant_endo(model, a, p)?.max_residual());
    }
    Ok(worst)
}

/// Pulled-back metric (A*g)(X,Y) = g(AX, AY) as a model on the same chart.
pub fn pullback_model(model: &ManifoldModel, a: &EndomorphismField) -> ManifoldModel {
    let g = model.metric_field().clone();
    let af = a.field();
    let metric = Arc::new(move |p: &[f64]| {
        let am = af(p);
        am.transpose() * g(p) * am
    });
    let mut m = ManifoldModel::new(format!("{}^* {}", a.name, model.name), model.chart.clone(), model.signature, metric);
    m.fd = model.fd.clone();
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugationReport {
    /// max |Γ^{A*g} − A⁻¹(∂A + Γ^g A)| over indices and points.
    pub connection: f64,
    /// max |R^{A*g}(X,Y,Z,V) − R^g(X,Y,AZ,AV)| over coordinate quadruples.
    pub curvature: f64,
    /// Codazzi residual of A⁻¹ with respect to A*g.
    pub inverse_codazzi: f64,
}

/// Verifies ∇^{A*g}_X = A⁻¹∘∇^g_X∘A, the pulled-back curvature identity and
/// that A⁻¹ is Codazzi for A*g.
pub fn conjugated_connection_check(
    model: &ManifoldModel,
    a: &EndomorphismField,
    points: &[Vec<f64>],
    with_curvature: bool,
) -> Result<ConjugationReport> {
    let pulled = pullback_model(model, a);
    let ainv = a.inverse();
    let n = model.dim;
    let mut rep = ConjugationReport { connection: 0.0, curvature: 0.0, inverse_codazzi: 0.0 };
    for p in points {
        let am = a.at(p);
        let cond = crate::linalg::condition_number(&am);
        if !(cond < 1e10) {
            return Err(Error::SingularA { condition: cond });
        }
        let aminv = am.clone().try_inverse().ok_or(Error::SingularA { condition: cond })?;
        let g0 = christoffel(model, p)?;
        let g1 = christoffel(&pulled, p)?;
        for i in 0..n {
            let da = central_difference(|q| a.at(q), p, i, model.fd.h(i));
            let pred = &aminv * (da + g0.axis(i) * &am);
            let got = g1.axis(i);
            rep.connection = rep.connection.max((pred - got).amax());
        }
        if with_curvature {
            let r0 = riemann(model, p)?;
            let r1 = riemann(&pulled, p)?;
            let e = |k: usize| {
                let mut v = DVector::zeros(n);
                v[k] = 1.0;
                v
            };
            for x in 0..n {
                for y in x + 1..n {
                    for z in 0..n {
                        for v in 0..n {
                            let lhs = r1.lowered(&e(x), &e(y), &e(z), &e(v));
                            let rhs = r0.lowered(&e(x), &e(y), &(&am * e(z)), &(&am * e(v)));
                            rep.curvature = rep.curvature.max((lhs - rhs).abs());
                        }
                    }
                }
            }
        }
        rep.inverse_codazzi = rep.inverse_codazzi.max(covariant_endo(&pulled, &ainv, p)?.max_residual());
    }
    Ok(rep)
}

/// ‖Ric∘A − A∘Ric‖ (orthonormal Frobenius norm) at `p`.
pub fn ricci_commutation_residual(model: &ManifoldModel, a: &EndomorphismField, p: &[f64]) -> Result<f64> {
    let r = riemann(model, p)?;
    let ric = r.ricci_endomorphism();
    let am = a.at(p);
    Ok(endo_norm(&r.metric, &(&ric * &am - &am * &ric)))
}
