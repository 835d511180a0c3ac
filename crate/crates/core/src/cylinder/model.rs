use crate::error::{Error, Result};
use crate::geometry::{central_difference, ChartBox, ManifoldModel, Signature};
use crate::sampling;
use crate::warped::{max_codazzi_residual, pullback_model, spectral_bounds, EndomorphismField, SpectralBounds, WarpedProductModel};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// Relative amount by which finite interval endpoints are pulled inwards.
pub const ENDPOINT_SHRINK: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct CylinderOptions {
    /// Largest Codazzi residual accepted for H.
    pub codazzi_tol: f64,
    /// Random base points for the Codazzi check.
    pub codazzi_points: usize,
    /// Lattice points per axis and extra random points for the spectral scan.
    pub scan_per_axis: usize,
    pub scan_random: usize,
    /// |t| is capped at this value in the chart window.
    pub t_cap: f64,
    pub seed: u64,
}

impl Default for CylinderOptions {
    fn default() -> Self {
        CylinderOptions { codazzi_tol: 1e-6, codazzi_points: 12, scan_per_axis: 4, scan_random: 64, t_cap: 1.0, seed: 7 }
    }
}

/// Lorentzian cylinder (a, b) × M with g = −dt² + (H − 2t)^* g_b.
///
/// For C[F;H] the base metric g_b is the warped product ds² + e^{-4s}g_F;
/// for C(M;A) it is A^*g_0 and H = A⁻¹, which gives g = −dt² + (1 − 2tA)^*g_0.
#[derive(Clone, Debug)]
pub struct CylinderModel {
    pub name: String,
    pub base: ManifoldModel,
    pub warped: Option<WarpedProductModel>,
    pub h: EndomorphismField,
    /// Open interval on which H_t is invertible (from the sampled spectrum).
    pub t_interval: (f64, f64),
    /// Finite chart window for t inside the shrunk interval.
    pub t_window: (f64, f64),
    pub bounds: SpectralBounds,
}

fn shrink(x: f64) -> f64 {
    if x.is_finite() {
        x - ENDPOINT_SHRINK * x
    } else {
        x
    }
}

fn window(interval: (f64, f64), cap: f64) -> (f64, f64) {
    (shrink(interval.0).max(-cap), shrink(interval.1).min(cap))
}

fn check_codazzi(model: &ManifoldModel, e: &EndomorphismField, opts: &CylinderOptions) -> Result<()> {
    let mut rng = sampling::rng(opts.seed);
    let pts = sampling::random_points(&mut rng, &model.chart, 0.05, opts.codazzi_points);
    let res = max_codazzi_residual(model, e, &pts)?;
    if res > opts.codazzi_tol {
        return Err(Error::NonCodazziH { residual: res });
    }
    Ok(())
}

/// C[F;H] over the warped product `wp`: t ranges between half the largest
/// negative and half the smallest positive eigenvalue of H.
pub fn build_cylinder(wp: &WarpedProductModel, h: &EndomorphismField, opts: &CylinderOptions) -> Result<CylinderModel> {
    let mut cyl = build_cylinder_on(&wp.model(), h, opts)?;
    cyl.warped = Some(wp.clone());
    cyl.name = format!("C[{}; {}]", wp.fiber.name, h.name);
    Ok(cyl)
}

/// Cylinder over an arbitrary Riemannian base with g_t = (H − 2t)^* g_b.
pub fn build_cylinder_on(base: &ManifoldModel, h: &EndomorphismField, opts: &CylinderOptions) -> Result<CylinderModel> {
    check_codazzi(base, h, opts)?;
    let bounds = spectral_bounds(base, h, opts.scan_per_axis, opts.scan_random, opts.seed);
    let lo = bounds.sup_negative.map_or(f64::NEG_INFINITY, |m| 0.5 * m);
    let hi = bounds.inf_positive.map_or(f64::INFINITY, |m| 0.5 * m);
    assert!(lo < hi, "interval around t = 0 is empty");
    Ok(CylinderModel {
        name: format!("C({}; {})", base.name, h.name),
        base: base.clone(),
        warped: None,
        h: h.clone(),
        t_interval: (lo, hi),
        t_window: window((lo, hi), opts.t_cap),
        bounds,
    })
}

/// C(M;A) with g = −dt² + (1 − 2tA)^* g_0 on t ∈ ((2μ₋)⁻¹, (2μ₊)⁻¹), μ₋ the
/// most negative and μ₊ the largest positive eigenvalue of A.
pub fn build_cylinder_from_a(g0: &ManifoldModel, a: &EndomorphismField, opts: &CylinderOptions) -> Result<CylinderModel> {
    check_codazzi(g0, a, opts)?;
    let bounds = spectral_bounds(g0, a, opts.scan_per_axis, opts.scan_random, opts.seed);
    if bounds.global_inf <= 0.0 && bounds.global_sup >= 0.0 {
        return Err(Error::SingularA { condition: f64::INFINITY });
    }
    let lo = bounds.inf_negative.map_or(f64::NEG_INFINITY, |m| 0.5 / m);
    let hi = bounds.sup_positive.map_or(f64::INFINITY, |m| 0.5 / m);
    assert!(lo < hi, "interval around t = 0 is empty");
    let base = pullback_model(g0, a);
    Ok(CylinderModel {
        name: format!("C({}; {})", g0.name, a.name),
        base,
        warped: None,
        h: a.inverse(),
        t_interval: (lo, hi),
        t_window: window((lo, hi), opts.t_cap),
        bounds,
    })
}

impl CylinderModel {
    pub fn dim(&self) -> usize {
        self.base.dim + 1
    }

    pub fn with_t_window(mut self, lo: f64, hi: f64) -> Self {
        assert!(lo < 0.0 && 0.0 < hi);
        assert!(self.t_interval.0 < lo && hi < self.t_interval.1, "window must lie inside the interval");
        self.t_window = (lo, hi);
        self
    }

    /// Chart of C: t window times the base chart.
    pub fn chart(&self) -> ChartBox {
        let mut lo = vec![self.t_window.0];
        lo.extend(&self.base.chart.lo);
        let mut hi = vec![self.t_window.1];
        hi.extend(&self.base.chart.hi);
        ChartBox::new(lo, hi)
    }

    /// H_t = H − 2t Id at a base point.
    pub fn h_t(&self, t: f64, p: &[f64]) -> DMatrix<f64> {
        let h = self.h.at(p);
        let n = h.nrows();
        h - DMatrix::<f64>::identity(n, n) * (2.0 * t)
    }

    pub fn h_t_inv(&self, t: f64, p: &[f64]) -> Result<DMatrix<f64>> {
        let m = self.h_t(t, p);
        let cond = crate::linalg::condition_number(&m);
        m.try_inverse().ok_or(Error::SingularA { condition: cond })
    }

    /// ∂_k H at a base point.
    pub fn h_derivative(&self, p: &[f64], k: usize) -> DMatrix<f64> {
        let h = self.h.clone();
        central_difference(move |q| h.at(q), p, k, self.base.fd.h(k))
    }

    /// g_t = H_tᵀ g_b H_t in base coordinates.
    pub fn slice_metric(&self, t: f64, p: &[f64]) -> DMatrix<f64> {
        let ht = self.h_t(t, p);
        ht.transpose() * self.base.metric(p) * &ht
    }

    /// ġ_t = −2(g_b H_t + H_tᵀ g_b).
    pub fn slice_metric_dot(&self, t: f64, p: &[f64]) -> DMatrix<f64> {
        let ht = self.h_t(t, p);
        let g = self.base.metric(p);
        (&g * &ht + ht.transpose() * &g) * -2.0
    }

    /// Weingarten map W_t = 2H_t⁻¹ of the slice {t} × M.
    pub fn weingarten(&self, t: f64, p: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.h_t_inv(t, p)? * 2.0)
    }

    /// Full metric at q = (t, p).
    pub fn metric(&self, q: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        let mut g = DMatrix::zeros(n, n);
        g[(0, 0)] = -1.0;
        g.view_mut((1, 1), (n - 1, n - 1)).copy_from(&self.slice_metric(q[0], &q[1..]));
        g
    }

    /// Chart model of C. ∂_t g is analytic; base derivatives combine the
    /// base metric derivatives with finite differences of H.
    pub fn model(&self) -> ManifoldModel {
        let n = self.dim();
        let me = self.clone();
        let metric = {
            let me = me.clone();
            Arc::new(move |q: &[f64]| me.metric(q))
        };
        let derivs = Arc::new(move |q: &[f64]| {
            let (t, p) = (q[0], &q[1..]);
            let ht = me.h_t(t, p);
            let g = me.base.metric(p);
            let dg = me.base.metric_derivatives(p);
            let mut out = Vec::with_capacity(n);
            let mut d0 = DMatrix::zeros(n, n);
            d0.view_mut((1, 1), (n - 1, n - 1)).copy_from(&me.slice_metric_dot(t, p));
            out.push(d0);
            for (k, dgk) in dg.iter().enumerate() {
                let dh = me.h_derivative(p, k);
                let a = dh.transpose() * &g * &ht;
                let block = &a + a.transpose() + ht.transpose() * dgk * &ht;
                let mut d = DMatrix::zeros(n, n);
                d.view_mut((1, 1), (n - 1, n - 1)).copy_from(&block);
                out.push(d);
            }
            out
        });
        let mut scale = vec![1.0];
        scale.extend(&self.base.fd.scale);
        ManifoldModel::new(self.name.clone(), self.chart(), Signature::lorentzian(n), metric)
            .with_derivatives(derivs)
            .with_fd_scale(scale)
    }

    /// Lift of a base vector to C: (0, v).
    pub fn lift(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        out.rows_mut(1, self.base.dim).copy_from(v);
        out
    }

    /// ∂_t.
    pub fn dt(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        out[0] = 1.0;
        out
    }

    /// Base warped product, or `WrongBase` unless it is ds² + e^{-4s}g_F.
    pub fn warped_base(&self) -> Result<&WarpedProductModel> {
        match &self.warped {
            Some(w) if w.warping.is_standard() => Ok(w),
            _ => Err(Error::WrongBase),
        }
    }
}
