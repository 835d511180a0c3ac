//! Levi-Civita connection in a chart and in an orthonormal frame.

use super::model::{central_difference, central_difference_vec, ManifoldModel, VectorField};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Christoffel symbols Γ^k_ij at a point; `data[(k*n + i)*n + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Christoffel {
    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    /// Γ(x, v)^k = Γ^k_ij x^i v^j.
    pub fn contract(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let mut out = DVector::zeros(n);
        for k in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                if x[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    s += self.get(k, i, j) * x[i] * v[j];
                }
            }
            out[k] = s;
        }
        out
    }

    /// Matrix M with M^k_j = Γ^k_ij x^i, so that ∇_x V = x(V) + M V.
    pub fn along(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for k in 0..n {
                for j in 0..n {
                    m[(k, j)] += self.get(k, i, j) * xi;
                }
            }
        }
        m
    }

    /// Matrix (Γ_i)^k_j = Γ^k_ij for a coordinate direction.
    pub fn axis(&self, i: usize) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |k, j| self.get(k, i, j))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |a, &b| a.max(b.abs()))
    }
}

/// Γ^k_ij = ½ g^{kl}(∂_i g_lj + ∂_j g_li − ∂_l g_ij) with chart checks.
pub fn christoffel(model: &ManifoldModel, p: &[f64]) -> Result<Christoffel> {
    model.check_point(p, 2.0)?;
    christoffel_unchecked(model, p)
}

/// As [`christoffel`] but without the chart-margin gate; the metric must
/// still be invertible.
pub fn christoffel_unchecked(model: &ManifoldModel, p: &[f64]) -> Result<Christoffel> {
    let (_g, ginv) = model.inverse_metric(p)?;
    let dg = model.metric_derivatives(p);
    Ok(christoffel_from(&ginv, &dg))
}

pub fn christoffel_from(ginv: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Christoffel {
    let n = ginv.nrows();
    // lowered[(l*n + i)*n + j] = ½(∂_i g_lj + ∂_j g_li − ∂_l g_ij)
    let mut lowered = vec![0.0; n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = 0.5 * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)]);
                lowered[(l * n + i) * n + j] = v;
                lowered[(l * n + j) * n + i] = v;
            }
        }
    }
    let mut data = vec![0.0; n * n * n];
    for k in 0..n {
        for l in 0..n {
            let gkl = ginv[(k, l)];
            if gkl == 0.0 {
                continue;
            }
            for ij in 0..n * n {
                data[k * n * n + ij] += gkl * lowered[l * n * n + ij];
            }
        }
    }
    Christoffel { n, data }
}

/// Residual of ∂_k g_ij − Γ^l_ki g_lj − Γ^l_kj g_il, max over indices.
pub fn metric_compatibility_residual(model: &ManifoldModel, p: &[f64]) -> Result<f64> {
    let gam = christoffel(model, p)?;
    let g = model.metric(p);
    let dg = model.metric_derivatives(p);
    let n = model.dim;
    let mut worst = 0.0_f64;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut r = dg[k][(i, j)];
                for l in 0..n {
                    r -= gam.get(l, k, i) * g[(l, j)] + gam.get(l, k, j) * g[(i, l)];
                }
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

/// Covariant derivative ∇_X V at `p` of a chart vector field `v`.
pub fn covariant_derivative(
    model: &ManifoldModel,
    p: &[f64],
    x: &DVector<f64>,
    v: &dyn Fn(&[f64]) -> DVector<f64>,
) -> Result<DVector<f64>> {
    let gam = christoffel(model, p)?;
    let dv = directional_derivative_vec(model, p, x, v);
    Ok(dv + gam.contract(x, &v(p)))
}

/// x^i ∂_i V by fourth-order differences.
pub fn directional_derivative_vec(
    model: &ManifoldModel,
    p: &[f64],
    x: &DVector<f64>,
    v: &dyn Fn(&[f64]) -> DVector<f64>,
) -> DVector<f64> {
    let mut out = DVector::zeros(v(p).len());
    for i in 0..model.dim {
        if x[i] != 0.0 {
            out += central_difference_vec(v, p, i, model.fd.h(i)) * x[i];
        }
    }
    out
}

/// x^i ∂_i M for a matrix field.
pub fn directional_derivative_mat(
    model: &ManifoldModel,
    p: &[f64],
    x: &DVector<f64>,
    m: &dyn Fn(&[f64]) -> DMatrix<f64>,
) -> DMatrix<f64> {
    let m0 = m(p);
    let mut out = DMatrix::zeros(m0.nrows(), m0.ncols());
    for i in 0..model.dim {
        if x[i] != 0.0 {
            out += central_difference(m, p, i, model.fd.h(i)) * x[i];
        }
    }
    out
}

/// [X, Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k by finite differences.
pub fn lie_bracket(model: &ManifoldModel, x: &VectorField, y: &VectorField, p: &[f64]) -> Result<DVector<f64>> {
    model.check_point(p, 2.0)?;
    let xp = x(p);
    let yp = y(p);
    let dy = directional_derivative_vec(model, p, &xp, &|q| y(q));
    let dx = directional_derivative_vec(model, p, &yp, &|q| x(q));
    Ok(dy - dx)
}

/// Frame signs ε_i = g(e_i, e_i) rounded to ±1.
pub fn frame_signs(model: &ManifoldModel, p: &[f64]) -> Result<Vec<f64>> {
    let e = model.frame_at(p)?;
    let g = model.metric(p);
    Ok((0..model.dim)
        .map(|i| {
            let c = e.column(i);
            (c.transpose() * &g * c)[(0, 0)].signum()
        })
        .collect())
}

/// Structure constants c^k_ij of the frame: analytic table when the frame
/// supplies one, otherwise numerical brackets projected onto the frame.
pub fn frame_commutators(model: &ManifoldModel, p: &[f64]) -> Result<Vec<f64>> {
    let frame = model.frame().ok_or(Error::MissingFrame)?;
    if let Some(c) = &frame.commutators {
        return Ok(c(p));
    }
    numerical_frame_commutators(model, p)
}

/// Structure constants from finite-difference Lie brackets of the frame.
pub fn numerical_frame_commutators(model: &ManifoldModel, p: &[f64]) -> Result<Vec<f64>> {
    model.check_point(p, 2.0)?;
    let frame = model.frame().ok_or(Error::MissingFrame)?;
    let n = model.dim;
    let e = (frame.vectors)(p);
    let g = model.metric(p);
    let eps = frame_signs(model, p)?;
    // de[a] = ∂_a (frame matrix)
    let de: Vec<DMatrix<f64>> = (0..n)
        .map(|a| central_difference(|q| (frame.vectors)(q), p, a, model.fd.h(a)))
        .collect();
    let mut c = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            // [e_i, e_j] = e_i^a ∂_a e_j − e_j^a ∂_a e_i
            let mut br = DVector::zeros(n);
            for a in 0..n {
                br += de[a].column(j) * e[(a, i)] - de[a].column(i) * e[(a, j)];
            }
            for k in 0..n {
                let ek = e.column(k);
                c[(i * n + j) * n + k] = eps[k] * (br.transpose() * &g * ek)[(0, 0)];
            }
        }
    }
    Ok(c)
}

/// Table ω[(i*n + j)*n + k] = ⟨∇_{e_i} e_j, e_k⟩ from the Koszul formula
/// 2⟨∇_{e_i}e_j, e_k⟩ = −⟨e_i,[e_j,e_k]⟩ − ⟨e_j,[e_i,e_k]⟩ + ⟨e_k,[e_i,e_j]⟩.
pub fn frame_connection_table(model: &ManifoldModel, p: &[f64]) -> Result<Vec<f64>> {
    let c = frame_commutators(model, p)?;
    let eps = frame_signs(model, p)?;
    Ok(koszul_from_commutators(&c, &eps))
}

pub fn koszul_from_commutators(c: &[f64], eps: &[f64]) -> Vec<f64> {
    let n = eps.len();
    let cc = |i: usize, j: usize, k: usize| c[(i * n + j) * n + k];
    let mut out = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = -eps[i] * cc(j, k, i) - eps[j] * cc(i, k, j) + eps[k] * cc(i, j, k);
                out[(i * n + j) * n + k] = 0.5 * v;
            }
        }
    }
    out
}

/// ⟨∇_{e_i} e_j, e_k⟩ via the Koszul formula.
pub fn frame_connection(model: &ManifoldModel, i: usize, j: usize, k: usize, p: &[f64]) -> Result<f64> {
    let n = model.dim;
    let t = frame_connection_table(model, p)?;
    Ok(t[(i * n + j) * n + k])
}

/// Same table computed in the chart: ⟨e_i^a ∂_a e_j + Γ(e_i, e_j), e_k⟩.
pub fn frame_connection_table_chart(model: &ManifoldModel, p: &[f64]) -> Result<Vec<f64>> {
    let frame = model.frame().ok_or(Error::MissingFrame)?;
    let gam = christoffel(model, p)?;
    let n = model.dim;
    let e = (frame.vectors)(p);
    let g = model.metric(p);
    let de: Vec<DMatrix<f64>> = (0..n)
        .map(|a| central_difference(|q| (frame.vectors)(q), p, a, model.fd.h(a)))
        .collect();
    let mut out = vec![0.0; n * n * n];
    for i in 0..n {
        let ei = e.column(i).into_owned();
        let m = gam.along(&ei);
        for j in 0..n {
            let mut v = &m * e.column(j);
            for a in 0..n {
                v += de[a].column(j) * ei[a];
            }
            let gv = g.transpose() * v;
            for k in 0..n {
                out[(i * n + j) * n + k] = gv.dot(&e.column(k));
            }
        }
    }
    Ok(out)
}

/// Connection one-form of the frame along an arbitrary chart vector:
/// ω_x[(j, k)] = ⟨∇_x e_j, e_k⟩.
pub fn frame_connection_along(model: &ManifoldModel, p: &[f64], x: &DVector<f64>) -> Result<DMatrix<f64>> {
    let frame = model.frame().ok_or(Error::MissingFrame)?;
    let gam = christoffel(model, p)?;
    let n = model.dim;
    let e = (frame.vectors)(p);
    let g = model.metric(p);
    let de = directional_derivative_mat(model, p, x, &|q| (frame.vectors)(q));
    let m = gam.along(x);
    let nab = de + m * &e;
    Ok(DMatrix::from_fn(n, n, |j, k| (nab.column(j).transpose() * &g * e.column(k))[(0, 0)]))
}
