use crate::geometry::{central_difference, ChartBox, FrameField, ManifoldModel, Signature};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Warping function f with its first two derivatives.
#[derive(Clone)]
pub struct Warping {
    pub f: ScalarFn,
    pub df: ScalarFn,
    pub ddf: ScalarFn,
    /// `Some(k)` when f = e^{ks}.
    pub exponent: Option<f64>,
}

impl std::fmt::Debug for Warping {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Warping(exponent={:?})", self.exponent)
    }
}

impl Warping {
    /// f(s) = e^{ks}.
    pub fn exponential(k: f64) -> Warping {
        Warping {
            f: Arc::new(move |s| (k * s).exp()),
            df: Arc::new(move |s| k * (k * s).exp()),
            ddf: Arc::new(move |s| k * k * (k * s).exp()),
            exponent: Some(k),
        }
    }

    pub fn custom(f: ScalarFn, df: ScalarFn, ddf: ScalarFn) -> Warping {
        Warping { f, df, ddf, exponent: None }
    }

    /// True for the designated warping f = e^{-2s}.
    pub fn is_standard(&self) -> bool {
        matches!(self.exponent, Some(k) if (k + 2.0).abs() < 1e-15)
    }
}

/// ℝ ×_f F with metric ds² + f(s)² g_F in coordinates (s, x).
#[derive(Clone, Debug)]
pub struct WarpedProductModel {
    pub fiber: ManifoldModel,
    pub warping: Warping,
    pub s_range: (f64, f64),
}

impl WarpedProductModel {
    pub fn new(fiber: ManifoldModel, warping: Warping, s_range: (f64, f64)) -> Self {
        assert!(s_range.0 < s_range.1);
        WarpedProductModel { fiber, warping, s_range }
    }

    /// The designated base ds² + e^{-4s} g_F.
    pub fn standard(fiber: ManifoldModel, s_range: (f64, f64)) -> Self {
        Self::new(fiber, Warping::exponential(-2.0), s_range)
    }

    pub fn dim(&self) -> usize {
        self.fiber.dim + 1
    }

    pub fn f(&self, s: f64) -> f64 {
        (self.warping.f)(s)
    }
    pub fn df(&self, s: f64) -> f64 {
        (self.warping.df)(s)
    }
    pub fn ddf(&self, s: f64) -> f64 {
        (self.warping.ddf)(s)
    }

    /// Full metric at (s, x).
    pub fn metric(&self, p: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        let gf = self.fiber.metric(&p[1..]);
        let f = self.f(p[0]);
        let mut g = DMatrix::zeros(n, n);
        g[(0, 0)] = 1.0;
        g.view_mut((1, 1), (n - 1, n - 1)).copy_from(&(gf * (f * f)));
        g
    }

    /// The assembled chart model, with analytic metric derivatives built from
    /// the fiber derivatives and a frame (∂_s, f⁻¹ e_a^F) when the fiber has one.
    pub fn model(&self) -> ManifoldModel {
        let n = self.dim();
        let mut lo = vec![self.s_range.0];
        lo.extend(&self.fiber.chart.lo);
        let mut hi = vec![self.s_range.1];
        hi.extend(&self.fiber.chart.hi);
        let fiber = self.fiber.clone();
        let w = self.warping.clone();
        let metric = {
            let fiber = fiber.clone();
            let w = w.clone();
            Arc::new(move |p: &[f64]| {
                let gf = fiber.metric(&p[1..]);
                let f = (w.f)(p[0]);
                let mut g = DMatrix::zeros(n, n);
                g[(0, 0)] = 1.0;
                g.view_mut((1, 1), (n - 1, n - 1)).copy_from(&(gf * (f * f)));
                g
            })
        };
        let derivs = {
            let fiber = fiber.clone();
            let w = w.clone();
            Arc::new(move |p: &[f64]| {
                let x = &p[1..];
                let gf = fiber.metric(x);
                let dgf = fiber.metric_derivatives(x);
                let f = (w.f)(p[0]);
                let df = (w.df)(p[0]);
                let mut out = Vec::with_capacity(n);
                let mut d0 = DMatrix::zeros(n, n);
                d0.view_mut((1, 1), (n - 1, n - 1)).copy_from(&(gf * (2.0 * f * df)));
                out.push(d0);
                for dk in dgf {
                    let mut d = DMatrix::zeros(n, n);
                    d.view_mut((1, 1), (n - 1, n - 1)).copy_from(&(dk * (f * f)));
                    out.push(d);
                }
                out
            })
        };
        let mut scale = vec![1.0];
        scale.extend(&self.fiber.fd.scale);
        let mut m = ManifoldModel::new(
            format!("R x_f {}", self.fiber.name),
            ChartBox::new(lo, hi),
            Signature::riemannian(n),
            metric,
        )
        .with_derivatives(derivs)
        .with_fd_scale(scale);
        if let Some(ff) = fiber.frame() {
            let fv = ff.vectors.clone();
            let w2 = w.clone();
            let vectors = Arc::new(move |p: &[f64]| {
                let ef = fv(&p[1..]);
                let f = (w2.f)(p[0]);
                let mut e = DMatrix::zeros(n, n);
                e[(0, 0)] = 1.0;
                e.view_mut((1, 1), (n - 1, n - 1)).copy_from(&(ef / f));
                e
            });
            let mut frame = FrameField::new(vectors);
            if let Some(cf) = ff.commutators.clone() {
                let w3 = w.clone();
                frame = frame.with_commutators(Arc::new(move |p: &[f64]| {
                    let m = n - 1;
                    let cfib = cf(&p[1..]);
                    let f = (w3.f)(p[0]);
                    let hf = (w3.df)(p[0]) / f;
                    let mut c = vec![0.0; n * n * n];
                    for a in 0..m {
                        // [∂_s, e_a] = −(ḟ/f) e_a
                        c[(a + 1) * n + (a + 1)] = -hf;
                        c[((a + 1) * n) * n + (a + 1)] = hf;
                        for b in 0..m {
                            for k in 0..m {
                                c[((a + 1) * n + (b + 1)) * n + (k + 1)] = cfib[(a * m + b) * m + k] / f;
                            }
                        }
                    }
                    c
                }));
            }
            m = m.with_frame(frame);
        }
        m
    }

    /// Lift of a fiber vector to (s, x): (0, v).
    pub fn lift(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        out.rows_mut(1, self.fiber.dim).copy_from(v);
        out
    }

    /// ∂_s at any point.
    pub fn ds(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        out[0] = 1.0;
        out
    }

    /// FD derivative helper for s-families of fiber matrices.
    pub fn s_derivative(&self, m: &dyn Fn(&[f64]) -> DMatrix<f64>, p: &[f64]) -> DMatrix<f64> {
        central_difference(m, p, 0, 1e-4)
    }
}
