//! Eguchi–Hanson metric in coordinates (r, θ, φ, ψ) with the left-invariant
//! frame (f∂_r, r⁻¹σ̂_x, r⁻¹σ̂_y, (rf)⁻¹σ̂_z).

use crate::geometry::{ChartBox, FrameField, ManifoldModel, Signature};
use nalgebra::{DMatrix, Matrix3};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct EguchiHansonModel {
    pub a: f64,
    pub r_range: (f64, f64),
    /// Distance kept from the coordinate poles θ = 0, π.
    pub theta_margin: f64,
    /// Added to γ in [`EguchiHansonModel::connection_table`] only; used to
    /// exercise failing checks.
    pub gamma_offset: f64,
}

impl EguchiHansonModel {
    pub fn new(a: f64) -> Self {
        assert!(a > 0.0);
        EguchiHansonModel { a, r_range: (1.2 * a, 4.0 * a), theta_margin: 0.25, gamma_offset: 0.0 }
    }

    pub fn with_r_range(mut self, lo: f64, hi: f64) -> Self {
        assert!(self.a < lo && lo < hi);
        self.r_range = (lo, hi);
        self
    }

    pub fn with_gamma_offset(mut self, d: f64) -> Self {
        self.gamma_offset = d;
        self
    }

    /// f(r) = (1 − (a/r)⁴)^{1/2}.
    pub fn f(&self, r: f64) -> f64 {
        (1.0 - (self.a / r).powi(4)).sqrt()
    }

    pub fn fprime(&self, r: f64) -> f64 {
        2.0 * self.a.powi(4) / (r.powi(5) * self.f(r))
    }

    /// γ(r) = 2r⁻¹f⁻¹ − r⁻¹f.
    pub fn gamma(&self, r: f64) -> f64 {
        let f = self.f(r);
        2.0 / (r * f) - f / r
    }

    pub fn chart(&self) -> ChartBox {
        let m = self.theta_margin;
        ChartBox::new(vec![self.r_range.0, m, 0.0, 0.0], vec![self.r_range.1, PI - m, 2.0 * PI, 2.0 * PI])
    }

    /// Rows σ_x, σ_y, σ_z over (dθ, dφ, dψ).
    pub fn sigma(theta: f64, psi: f64) -> Matrix3<f64> {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = psi.sin_cos();
        Matrix3::new(0.5 * sp, -0.5 * st * cp, 0.0, -0.5 * cp, -0.5 * st * sp, 0.0, 0.0, 0.5 * ct, 0.5)
    }

    fn sigma_dtheta(theta: f64, psi: f64) -> Matrix3<f64> {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = psi.sin_cos();
        Matrix3::new(0.0, -0.5 * ct * cp, 0.0, 0.0, -0.5 * ct * sp, 0.0, 0.0, -0.5 * st, 0.0)
    }

    fn sigma_dpsi(theta: f64, psi: f64) -> Matrix3<f64> {
        let st = theta.sin();
        let (sp, cp) = psi.sin_cos();
        Matrix3::new(0.5 * cp, 0.5 * st * sp, 0.0, 0.5 * sp, -0.5 * st * cp, 0.0, 0.0, 0.0, 0.0)
    }

    /// Orthonormal coframe θ^a as rows over (dr, dθ, dφ, dψ).
    pub fn coframe(&self, p: &[f64]) -> DMatrix<f64> {
        let r = p[0];
        let f = self.f(r);
        let s = Self::sigma(p[1], p[3]);
        let mut c = DMatrix::zeros(4, 4);
        c[(0, 0)] = 1.0 / f;
        let w = [r, r, r * f];
        for a in 0..3 {
            for j in 0..3 {
                c[(a + 1, j + 1)] = w[a] * s[(a, j)];
            }
        }
        c
    }

    fn coframe_derivs(&self, p: &[f64]) -> [DMatrix<f64>; 4] {
        let r = p[0];
        let f = self.f(r);
        let fp = self.fprime(r);
        let s = Self::sigma(p[1], p[3]);
        let st = Self::sigma_dtheta(p[1], p[3]);
        let sp = Self::sigma_dpsi(p[1], p[3]);
        let w = [r, r, r * f];
        let dw = [1.0, 1.0, f + r * fp];
        let mut dr = DMatrix::zeros(4, 4);
        let mut dth = DMatrix::zeros(4, 4);
        let mut dps = DMatrix::zeros(4, 4);
        dr[(0, 0)] = -fp / (f * f);
        for a in 0..3 {
            for j in 0..3 {
                dr[(a + 1, j + 1)] = dw[a] * s[(a, j)];
                dth[(a + 1, j + 1)] = w[a] * st[(a, j)];
                dps[(a + 1, j + 1)] = w[a] * sp[(a, j)];
            }
        }
        [dr, dth, DMatrix::zeros(4, 4), dps]
    }

    pub fn metric(&self, p: &[f64]) -> DMatrix<f64> {
        let c = self.coframe(p);
        c.transpose() * c
    }

    /// ∂_k g from the coframe derivatives.
    pub fn metric_derivatives(&self, p: &[f64]) -> Vec<DMatrix<f64>> {
        let c = self.coframe(p);
        self.coframe_derivs(p)
            .iter()
            .map(|d| {
                let m = d.transpose() * &c;
                &m + m.transpose()
            })
            .collect()
    }

    /// Frame vectors as columns (inverse of the coframe).
    pub fn frame(&self, p: &[f64]) -> DMatrix<f64> {
        self.coframe(p).try_inverse().expect("coframe invertible inside the chart")
    }

    /// Structure constants c^k_ij, `(i*4 + j)*4 + k`.
    pub fn commutators(&self, r: f64) -> Vec<f64> {
        let f = self.f(r);
        let g = self.gamma(r);
        let mut c = vec![0.0; 64];
        let mut set = |i: usize, j: usize, k: usize, v: f64| {
            c[(i * 4 + j) * 4 + k] = v;
            c[(j * 4 + i) * 4 + k] = -v;
        };
        set(0, 1, 1, -f / r);
        set(0, 2, 2, -f / r);
        set(0, 3, 3, -g);
        set(1, 2, 3, -2.0 * f / r);
        set(1, 3, 2, 2.0 / (r * f));
        set(2, 3, 1, -2.0 / (r * f));
        c
    }

    /// The connection table ⟨∇_{e_i}e_j, e_k⟩ as listed for this frame,
    /// `(i*4 + j)*4 + k`; γ is shifted by `gamma_offset`.
    pub fn connection_table(&self, r: f64) -> Vec<f64> {
        let q = self.f(r) / r;
        let g = self.gamma(r) + self.gamma_offset;
        let mut t = vec![0.0; 64];
        let mut set = |i: usize, j: usize, k: usize, v: f64| t[(i * 4 + j) * 4 + k] = v;
        // ∇_{e_1}
        set(1, 0, 1, q);
        set(1, 1, 0, -q);
        set(1, 2, 3, -q);
        set(1, 3, 2, q);
        // ∇_{e_2}
        set(2, 0, 2, q);
        set(2, 1, 3, q);
        set(2, 2, 0, -q);
        set(2, 3, 1, -q);
        // ∇_{e_3}
        set(3, 0, 3, g);
        set(3, 1, 2, -g);
        set(3, 2, 1, g);
        set(3, 3, 0, -g);
        t
    }

    /// Human-readable entries of the connection table (nonzero ones).
    pub fn connection_labels() -> Vec<((usize, usize, usize), &'static str)> {
        vec![
            ((1, 0, 1), "f/r"),
            ((1, 1, 0), "-f/r"),
            ((1, 2, 3), "-f/r"),
            ((1, 3, 2), "f/r"),
            ((2, 0, 2), "f/r"),
            ((2, 1, 3), "f/r"),
            ((2, 2, 0), "-f/r"),
            ((2, 3, 1), "-f/r"),
            ((3, 0, 3), "gamma"),
            ((3, 1, 2), "-gamma"),
            ((3, 2, 1), "gamma"),
            ((3, 3, 0), "-gamma"),
        ]
    }

    pub fn model(&self) -> ManifoldModel {
        let me = self.clone();
        let metric = {
            let me = me.clone();
            Arc::new(move |p: &[f64]| me.metric(p))
        };
        let derivs = {
            let me = me.clone();
            Arc::new(move |p: &[f64]| me.metric_derivatives(p))
        };
        let vectors = {
            let me = me.clone();
            Arc::new(move |p: &[f64]| me.frame(p))
        };
        let comm = {
            let me = me.clone();
            Arc::new(move |p: &[f64]| me.commutators(p[0]))
        };
        ManifoldModel::new(format!("eguchi-hanson(a={})", self.a), self.chart(), Signature::riemannian(4), metric)
            .with_derivatives(derivs)
            .with_frame(FrameField::new(vectors).with_commutators(comm))
    }
}
