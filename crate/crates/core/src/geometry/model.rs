use crate::error::{Error, Result};
use crate::linalg;
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// Point → symmetric matrix (metric, endomorphism or frame columns).
pub type MatrixField = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
/// Point → list of `dim` matrices, entry `k` holding ∂_k g.
pub type MetricDerivField = Arc<dyn Fn(&[f64]) -> Vec<DMatrix<f64>> + Send + Sync>;
/// Point → vector in chart components.
pub type VectorField = Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;
/// Point → structure constants, entry `(i*n + j)*n + k` = c^k_ij with
/// [e_i, e_j] = c^k_ij e_k.
pub type CommutatorField = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Condition number above which a metric counts as singular.
pub const MAX_METRIC_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct ChartBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl ChartBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.iter().zip(&hi).all(|(a, b)| a < b), "empty chart box");
        ChartBox { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Distance from `p` to the boundary, per axis minimum; negative outside.
    pub fn inner_margin(&self, p: &[f64]) -> Vec<f64> {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(x, (a, b))| (x - a).min(b - x))
            .collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Box shrunk by `frac` of its width on every side.
    pub fn shrunk(&self, frac: f64) -> ChartBox {
        let lo = self.lo.iter().zip(&self.hi).map(|(a, b)| a + frac * (b - a)).collect();
        let hi = self.lo.iter().zip(&self.hi).map(|(a, b)| b - frac * (b - a)).collect();
        ChartBox { lo, hi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub plus: usize,
    pub minus: usize,
}

impl Signature {
    pub fn riemannian(n: usize) -> Self {
        Signature { plus: n, minus: 0 }
    }
    pub fn lorentzian(n: usize) -> Self {
        Signature { plus: n - 1, minus: 1 }
    }
}

/// Finite-difference settings. First derivatives of the metric use step
/// `step * scale[k]`; derivatives of Christoffel symbols (curvature) use the
/// coarser `curvature_step * scale[k]`, which balances round-off against
/// truncation for a nested difference.
#[derive(Debug, Clone, PartialEq)]
pub struct FdConfig {
    pub step: f64,
    pub curvature_step: f64,
    pub scale: Vec<f64>,
}

impl FdConfig {
    pub fn new(dim: usize) -> Self {
        FdConfig { step: 1e-4, curvature_step: 1e-3, scale: vec![1.0; dim] }
    }
    pub fn h(&self, k: usize) -> f64 {
        self.step * self.scale[k]
    }
    pub fn h2(&self, k: usize) -> f64 {
        self.curvature_step * self.scale[k]
    }
}

/// Orthonormal frame presented as coordinate columns, with optional
/// analytic structure constants.
#[derive(Clone)]
pub struct FrameField {
    pub vectors: MatrixField,
    pub commutators: Option<CommutatorField>,
}

impl FrameField {
    pub fn new(vectors: MatrixField) -> Self {
        FrameField { vectors, commutators: None }
    }
    pub fn with_commutators(mut self, c: CommutatorField) -> Self {
        self.commutators = Some(c);
        self
    }
}

/// A coordinate chart carrying a metric field and optional frame.
#[derive(Clone)]
pub struct ManifoldModel {
    pub name: String,
    pub dim: usize,
    pub chart: ChartBox,
    pub signature: Signature,
    pub fd: FdConfig,
    metric: MatrixField,
    metric_derivatives: Option<MetricDerivField>,
    frame: Option<FrameField>,
}

impl std::fmt::Debug for ManifoldModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManifoldModel")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("chart", &self.chart)
            .field("signature", &self.signature)
            .field("analytic_derivatives", &self.metric_derivatives.is_some())
            .field("frame", &self.frame.is_some())
            .finish()
    }
}

impl ManifoldModel {
    pub fn new(name: impl Into<String>, chart: ChartBox, signature: Signature, metric: MatrixField) -> Self {
        let dim = chart.dim();
        assert_eq!(signature.plus + signature.minus, dim, "signature does not match dimension");
        ManifoldModel {
            name: name.into(),
            dim,
            chart,
            signature,
            fd: FdConfig::new(dim),
            metric,
            metric_derivatives: None,
            frame: None,
        }
    }

    pub fn with_derivatives(mut self, d: MetricDerivField) -> Self {
        self.metric_derivatives = Some(d);
        self
    }

    pub fn with_frame(mut self, frame: FrameField) -> Self {
        self.frame = Some(frame);
        self
    }

    pub fn without_frame(mut self) -> Self {
        self.frame = None;
        self
    }

    pub fn with_fd_scale(mut self, scale: Vec<f64>) -> Self {
        assert_eq!(scale.len(), self.dim);
        self.fd.scale = scale;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_chart(mut self, chart: ChartBox) -> Self {
        assert_eq!(chart.dim(), self.dim);
        self.chart = chart;
        self
    }

    pub fn metric_field(&self) -> &MatrixField {
        &self.metric
    }

    pub fn frame(&self) -> Option<&FrameField> {
        self.frame.as_ref()
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.metric_derivatives.is_some()
    }

    pub fn metric(&self, p: &[f64]) -> DMatrix<f64> {
        (self.metric)(p)
    }

    /// ∂_k g at `p`: analytic if supplied, otherwise 4th-order central differences.
    pub fn metric_derivatives(&self, p: &[f64]) -> Vec<DMatrix<f64>> {
        match &self.metric_derivatives {
            Some(d) => d(p),
            None => self.metric_derivatives_fd(p),
        }
    }

    pub fn metric_derivatives_fd(&self, p: &[f64]) -> Vec<DMatrix<f64>> {
        (0..self.dim)
            .map(|k| {
                let h = self.fd.h(k);
                central_difference(|q| (self.metric)(q), p, k, h)
            })
            .collect()
    }

    /// Frame columns at `p`.
    pub fn frame_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.frame.as_ref().map(|f| (f.vectors)(p)).ok_or(Error::MissingFrame)
    }

    /// Fails with `OutOfChart` unless every coordinate is at least
    /// `steps` first-derivative FD steps from the boundary.
    pub fn check_point(&self, p: &[f64], margin_steps: f64) -> Result<()> {
        self.check_margin(p, |k| margin_steps * self.fd.h(k))
    }

    /// Margin needed for curvature: two coarse steps plus two fine steps.
    pub fn check_point_curvature(&self, p: &[f64]) -> Result<()> {
        self.check_margin(p, |k| 2.0 * self.fd.h2(k) + 2.0 * self.fd.h(k))
    }

    fn check_margin(&self, p: &[f64], need: impl Fn(usize) -> f64) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::OutOfChart { point: p.to_vec(), margin: f64::NAN });
        }
        for (k, m) in self.chart.inner_margin(p).into_iter().enumerate() {
            if !(m >= need(k)) {
                return Err(Error::OutOfChart { point: p.to_vec(), margin: m });
            }
        }
        Ok(())
    }

    /// Inverse metric, rejecting ill-conditioned points.
    pub fn inverse_metric(&self, p: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let g = self.metric(p);
        let cond = linalg::condition_number(&g);
        if !(cond < MAX_METRIC_CONDITION) {
            return Err(Error::SingularMetric { point: p.to_vec(), condition: cond });
        }
        let ginv = g.clone().try_inverse().ok_or(Error::SingularMetric { point: p.to_vec(), condition: cond })?;
        Ok((g, ginv))
    }

    /// g(u, v) at `p`.
    pub fn inner(&self, p: &[f64], u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (u.transpose() * self.metric(p) * v)[(0, 0)]
    }

    /// Diagnostics for the model invariants at the given points.
    pub fn diagnose(&self, points: &[Vec<f64>]) -> ModelDiagnostics {
        let mut d = ModelDiagnostics::default();
        for p in points {
            let g = self.metric(p);
            d.max_asymmetry = d.max_asymmetry.max((&g - g.transpose()).amax());
            let ev = linalg::sym_eigenvalues(&g);
            let neg = ev.iter().filter(|&&x| x < 0.0).count();
            if neg != self.signature.minus || ev.iter().any(|x| *x == 0.0) {
                d.signature_violations += 1;
            }
            if let Some(an) = &self.metric_derivatives {
                let a = an(p);
                let f = self.metric_derivatives_fd(p);
                for (x, y) in a.iter().zip(&f) {
                    d.max_derivative_mismatch = d.max_derivative_mismatch.max((x - y).amax());
                }
            }
            if let Some(fr) = &self.frame {
                let e = (fr.vectors)(p);
                let gram = e.transpose() * &g * &e;
                let mut eta = DMatrix::<f64>::identity(self.dim, self.dim);
                for i in 0..self.dim {
                    eta[(i, i)] = gram[(i, i)].signum();
                }
                d.max_frame_defect = d.max_frame_defect.max((gram - eta).amax());
            }
        }
        d
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelDiagnostics {
    pub max_asymmetry: f64,
    pub signature_violations: usize,
    pub max_derivative_mismatch: f64,
    pub max_frame_defect: f64,
}

/// Fourth-order central difference of a matrix-valued function along axis `k`.
pub fn central_difference<F>(f: F, p: &[f64], k: usize, h: f64) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> DMatrix<f64>,
{
    let mut q = p.to_vec();
    let mut eval = |off: f64| {
        q[k] = p[k] + off;
        f(&q)
    };
    let m2 = eval(-2.0 * h);
    let m1 = eval(-h);
    let p1 = eval(h);
    let p2 = eval(2.0 * h);
    (m2 - m1 * 8.0 + p1 * 8.0 - p2) / (12.0 * h)
}

/// Same stencil for vector-valued functions.
pub fn central_difference_vec<F>(f: F, p: &[f64], k: usize, h: f64) -> DVector<f64>
where
    F: Fn(&[f64]) -> DVector<f64>,
{
    let mut q = p.to_vec();
    let mut eval = |off: f64| {
        q[k] = p[k] + off;
        f(&q)
    };
    let m2 = eval(-2.0 * h);
    let m1 = eval(-h);
    let p1 = eval(h);
    let p2 = eval(2.0 * h);
    (m2 - m1 * 8.0 + p1 * 8.0 - p2) / (12.0 * h)
}

/// Scalar version of the stencil.
pub fn central_difference_scalar<F>(f: F, p: &[f64], k: usize, h: f64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let mut q = p.to_vec();
    let mut eval = |off: f64| {
        q[k] = p[k] + off;
        f(&q)
    };
    let m2 = eval(-2.0 * h);
    let m1 = eval(-h);
    let p1 = eval(h);
    let p2 = eval(2.0 * h);
    (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h)
}

/// Constant metric on a box, convenient for tests and flat fixtures.
pub fn constant_metric(g: DMatrix<f64>) -> MatrixField {
    Arc::new(move |_p: &[f64]| g.clone())
}
