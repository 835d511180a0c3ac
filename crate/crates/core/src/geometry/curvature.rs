//! Riemann tensor by differentiating Christoffel symbols.
//!
//! Convention: R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]}Z, so
//! R^l_{kij} = ∂_iΓ^l_{jk} − ∂_jΓ^l_{ik} + Γ^l_{im}Γ^m_{jk} − Γ^l_{jm}Γ^m_{ik}.

use super::connection::{christoffel, christoffel_unchecked, Christoffel};
use super::model::ManifoldModel;
use crate::error::Result;
use nalgebra::{DMatrix, DVector};

/// Overall sign applied to the curvature tensor. Fixed to the convention
/// above; exposed so a global flip would be a single edit.
pub const CURVATURE_SIGN: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSample {
    pub basepoint: Vec<f64>,
    pub n: usize,
    /// R^l_{kij} at index ((l*n + k)*n + i)*n + j.
    pub riemann: Vec<f64>,
    /// Ric_{kj} = R^i_{kij}.
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    pub metric: DMatrix<f64>,
}

impl CurvatureSample {
    #[inline]
    pub fn r(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        let n = self.n;
        self.riemann[((l * n + k) * n + i) * n + j]
    }

    /// Endomorphism R(X,Y) as a matrix acting on chart components.
    pub fn endomorphism(&self, x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                for l in 0..n {
                    for k in 0..n {
                        m[(l, k)] += self.r(l, k, i, j) * w;
                    }
                }
            }
        }
        m
    }

    /// R(X,Y)Z.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        self.endomorphism(x, y) * z
    }

    /// R(X,Y,Z,V) = g(R(X,Y)Z, V).
    pub fn lowered(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (self.apply(x, y, z).transpose() * &self.metric * v)[(0, 0)]
    }

    /// Ricci tensor as an endomorphism g^{-1} Ric.
    pub fn ricci_endomorphism(&self) -> DMatrix<f64> {
        let ginv = self.metric.clone().try_inverse().expect("metric invertible at sample");
        ginv * &self.ricci
    }

    /// Euclidean norm of all components R^l_{kij}.
    pub fn component_norm(&self) -> f64 {
        self.riemann.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.riemann.iter().fold(0.0_f64, |a, &b| a.max(b.abs()))
    }

    /// Residuals of (antisymmetry in i,j; first Bianchi; pair symmetry of
    /// the lowered tensor; Ricci symmetry).
    pub fn symmetry_residuals(&self) -> SymmetryResiduals {
        let n = self.n;
        let g = &self.metric;
        let low = |a: usize, b: usize, c: usize, d: usize| -> f64 {
            // R_{abcd} = g(R(∂_a,∂_b)∂_c, ∂_d) = g_{dl} R^l_{cab}
            (0..n).map(|l| g[(d, l)] * self.r(l, c, a, b)).sum()
        };
        let mut out = SymmetryResiduals::default();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let r = low(a, b, c, d);
                        out.antisymmetry = out.antisymmetry.max((r + low(b, a, c, d)).abs());
                        out.metric_antisymmetry = out.metric_antisymmetry.max((r + low(a, b, d, c)).abs());
                        out.pair_symmetry = out.pair_symmetry.max((r - low(c, d, a, b)).abs());
                        let bi = r + low(b, c, a, d) + low(c, a, b, d);
                        out.bianchi = out.bianchi.max(bi.abs());
                    }
                }
            }
        }
        out.ricci_symmetry = (&self.ricci - self.ricci.transpose()).amax();
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SymmetryResiduals {
    pub antisymmetry: f64,
    pub metric_antisymmetry: f64,
    pub pair_symmetry: f64,
    pub bianchi: f64,
    pub ricci_symmetry: f64,
}

impl SymmetryResiduals {
    pub fn max(&self) -> f64 {
        self.antisymmetry
            .max(self.metric_antisymmetry)
            .max(self.pair_symmetry)
            .max(self.bianchi)
            .max(self.ricci_symmetry)
    }
}

/// Riemann tensor, Ricci tensor and scalar curvature at `p`.
pub fn riemann(model: &ManifoldModel, p: &[f64]) -> Result<CurvatureSample> {
    model.check_point_curvature(p)?;
    let n = model.dim;
    let g0 = christoffel(model, p)?;
    // dgam[m] = ∂_m Γ
    let mut dgam: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut q = p.to_vec();
    for m in 0..n {
        let h = model.fd.h2(m);
        let mut eval = |off: f64| -> Result<Christoffel> {
            q[m] = p[m] + off;
            let c = christoffel_unchecked(model, &q);
            q[m] = p[m];
            c
        };
        let m2 = eval(-2.0 * h)?;
        let m1 = eval(-h)?;
        let p1 = eval(h)?;
        let p2 = eval(2.0 * h)?;
        let d: Vec<f64> = (0..n * n * n)
            .map(|t| (m2.data[t] - 8.0 * m1.data[t] + 8.0 * p1.data[t] - p2.data[t]) / (12.0 * h))
            .collect();
        dgam.push(d);
    }
    let dg = |m: usize, l: usize, i: usize, j: usize| dgam[m][(l * n + i) * n + j];
    let mut r = vec![0.0; n * n * n * n];
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = dg(i, l, j, k) - dg(j, l, i, k);
                    for m in 0..n {
                        v += g0.get(l, i, m) * g0.get(m, j, k) - g0.get(l, j, m) * g0.get(m, i, k);
                    }
                    r[((l * n + k) * n + i) * n + j] = CURVATURE_SIGN * v;
                }
            }
        }
    }
    let metric = model.metric(p);
    let mut ricci = DMatrix::zeros(n, n);
    for k in 0..n {
        for j in 0..n {
            ricci[(k, j)] = (0..n).map(|i| r[((i * n + k) * n + i) * n + j]).sum();
        }
    }
    let ginv = metric.clone().try_inverse().expect("checked by christoffel");
    let scalar = (&ginv * &ricci).trace();
    Ok(CurvatureSample { basepoint: p.to_vec(), n, riemann: r, ricci, scalar, metric })
}
