//! Dirac currents W_φ, the invariant q_φ and the distance of iφ from TM⋆φ.

use super::clifford::{cnorm, CVec, I};
use super::field::{SpinorField, VANISHING_NORM};
use crate::error::{Error, Result};
use crate::geometry::christoffel;
use crate::warped::EndomorphismField;
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct DiracCurrentSample {
    pub basepoint: Vec<f64>,
    /// W in chart components.
    pub w: DVector<f64>,
    /// W in frame components, w_j = i⟨e_j⋆φ, φ⟩₀.
    pub w_frame: DVector<f64>,
    pub norm_sq: f64,
    /// ‖φ‖⁴ − g(W, W).
    pub q_value: f64,
    /// Distance of iφ from the real span of the e_j⋆φ.
    pub dist_value: f64,
}

impl DiracCurrentSample {
    /// |q − dist²‖φ‖²|.
    pub fn lemma_residual(&self) -> f64 {
        (self.q_value - self.dist_value.powi(2) * self.norm_sq).abs()
    }
}

fn frame_current(field: &SpinorField, phi: &CVec) -> DVector<f64> {
    DVector::from_iterator(field.module.n(), field.module.kappas.iter().map(|k| (phi.dotc(&(k * phi)) * I).re))
}

/// Least-squares distance of iφ from span_ℝ{κ_jφ} in the real inner
/// product Re⟨·,·⟩₀.
pub fn distance_to_clifford_span(field: &SpinorField, phi: &CVec) -> f64 {
    let d = phi.len();
    let n = field.module.n();
    let mut m = DMatrix::zeros(2 * d, n);
    for (j, k) in field.module.kappas.iter().enumerate() {
        let v = k * phi;
        for r in 0..d {
            m[(r, j)] = v[r].re;
            m[(d + r, j)] = v[r].im;
        }
    }
    let ip = phi * I;
    let target = DVector::from_fn(2 * d, |r, _| if r < d { ip[r].re } else { ip[r - d].im });
    let svd = m.clone().svd(true, true);
    let coef = svd.solve(&target, 1e-12).expect("least squares");
    (target - m * coef).norm()
}

pub fn dirac_current(field: &SpinorField, p: &[f64]) -> Result<DiracCurrentSample> {
    let phi = field.at(p)?;
    let norm = cnorm(&phi);
    if norm < VANISHING_NORM {
        return Err(Error::VanishingSpinor { norm });
    }
    let w_frame = frame_current(field, &phi);
    let w = (field.frame)(p) * &w_frame;
    let g = field.model.metric(p);
    let norm_sq = norm * norm;
    let q_value = norm_sq * norm_sq - (w.transpose() * &g * &w)[(0, 0)];
    let dist_value = distance_to_clifford_span(field, &phi);
    Ok(DiracCurrentSample { basepoint: p.to_vec(), w, w_frame, norm_sq, q_value, dist_value })
}

/// max over chart directions of |∇_X W − 2‖φ‖²B(X)| at `p`, for a spinor
/// with ∇_Xφ = iB(X)⋆φ.
pub fn current_derivative_residual(field: &SpinorField, b: &EndomorphismField, p: &[f64]) -> Result<f64> {
    let n = field.model.dim;
    let gam = christoffel(&field.model, p)?;
    let here = dirac_current(field, p)?;
    let mut q = p.to_vec();
    let mut worst = 0.0_f64;
    let bm = b.at(p);
    for k in 0..n {
        let h = field.model.fd.h(k);
        let mut dw = DVector::zeros(n);
        for (off, c) in [(2.0, -1.0), (1.0, 8.0), (-1.0, -8.0), (-2.0, 1.0)] {
            q[k] = p[k] + off * h;
            dw += dirac_current(field, &q)?.w * (c / (12.0 * h));
        }
        q[k] = p[k];
        let mut x = DVector::zeros(n);
        x[k] = 1.0;
        let nabla = dw + gam.contract(&x, &here.w);
        let expect = bm.column(k) * (2.0 * here.norm_sq);
        worst = worst.max((nabla - expect).amax());
    }
    Ok(worst)
}
