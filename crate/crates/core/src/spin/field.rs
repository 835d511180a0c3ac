//! Spinor fields on frame components, integration of ∇ − iA⋆ and the
//! Codazzi residual.

use super::clifford::{cnorm, CMat, CVec, Parity, SpinorModule, C64, I};
use super::connection::spin_connection;
use crate::error::{Error, Result};
use crate::geometry::{ManifoldModel, MatrixField};
use crate::linalg::condition_number;
use crate::sampling;
use crate::warped::{pullback_model, EndomorphismField};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::sync::Arc;

pub type SpinorFn = Arc<dyn Fn(&[f64]) -> Result<CVec> + Send + Sync>;

/// Norm below which a spinor counts as vanishing.
pub const VANISHING_NORM: f64 = 1e-10;

/// Spinor field given by its components in an orthonormal frame.
#[derive(Clone)]
pub struct SpinorField {
    pub model: ManifoldModel,
    pub frame: MatrixField,
    pub module: Arc<SpinorModule>,
    pub parity: Parity,
    /// Point the field was constructed from.
    pub anchor: Vec<f64>,
    values: SpinorFn,
}

impl std::fmt::Debug for SpinorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpinorField")
            .field("model", &self.model.name)
            .field("module_dim", &self.module.module_dim())
            .field("parity", &self.parity)
            .field("anchor", &self.anchor)
            .finish()
    }
}

impl SpinorField {
    pub fn new(model: ManifoldModel, frame: MatrixField, module: Arc<SpinorModule>, parity: Parity, anchor: Vec<f64>, values: SpinorFn) -> Self {
        assert_eq!(module.n(), model.dim, "module and model dimensions differ");
        SpinorField { model, frame, module, parity, anchor, values }
    }

    /// Field with constant frame components.
    pub fn constant(model: ManifoldModel, frame: MatrixField, module: Arc<SpinorModule>, parity: Parity, psi: CVec) -> Self {
        let anchor = model.chart.center();
        SpinorField::new(model, frame, module, parity, anchor, Arc::new(move |_p: &[f64]| Ok(psi.clone())))
    }

    pub fn at(&self, p: &[f64]) -> Result<CVec> {
        (self.values)(p)
    }

    pub fn values(&self) -> &SpinorFn {
        &self.values
    }

    pub fn norm_sq(&self, p: &[f64]) -> Result<f64> {
        Ok(cnorm(&self.at(p)?).powi(2))
    }

    /// Frame components of a chart vector.
    pub fn frame_components(&self, p: &[f64], x: &DVector<f64>) -> DVector<f64> {
        let e = (self.frame)(p);
        e.lu().solve(x).expect("frame is invertible")
    }

    /// x⋆ as a module matrix for a chart vector x.
    pub fn clifford(&self, p: &[f64], x: &DVector<f64>) -> CMat {
        self.module.kappa(self.frame_components(p, x).as_slice())
    }

    /// ∂_kψ for every chart direction by fourth-order differences.
    pub fn partials(&self, p: &[f64]) -> Result<Vec<CVec>> {
        let mut q = p.to_vec();
        (0..self.model.dim)
            .map(|k| {
                let h = self.model.fd.h(k);
                let mut acc = CVec::zeros(self.module.module_dim());
                for (off, c) in [(2.0, -1.0), (1.0, 8.0), (-1.0, -8.0), (-2.0, 1.0)] {
                    q[k] = p[k] + off * h;
                    acc += self.at(&q)? * C64::new(c / (12.0 * h), 0.0);
                }
                q[k] = p[k];
                Ok(acc)
            })
            .collect()
    }

    /// ∇_xψ given precomputed partials.
    pub fn derivative_with(&self, p: &[f64], psi: &CVec, partials: &[CVec], x: &DVector<f64>) -> Result<CVec> {
        let mut out = spin_connection(&self.module, &self.model, &self.frame, p, x)? * psi;
        for (k, d) in partials.iter().enumerate() {
            if x[k] != 0.0 {
                out += d * C64::new(x[k], 0.0);
            }
        }
        Ok(out)
    }

    pub fn derivative(&self, p: &[f64], x: &DVector<f64>) -> Result<CVec> {
        let psi = self.at(p)?;
        self.derivative_with(p, &psi, &self.partials(p)?, x)
    }

    /// Distance of ψ(p) from the chosen half-spin space.
    pub fn parity_residual(&self, p: &[f64]) -> Result<f64> {
        let psi = self.at(p)?;
        let proj = self.module.parity_projector(self.parity);
        Ok(cnorm(&(&proj * &psi - &psi)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationOptions {
    /// RK4 steps per segment, independent of its length so that the field
    /// is smooth in the endpoint.
    pub steps: usize,
    /// Random tree vertices checked for path dependence.
    pub check_vertices: usize,
    /// Half width of the box around the root the vertices are drawn from.
    pub half_width: f64,
    /// Largest accepted path dependence.
    pub tol: f64,
    pub seed: u64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions { steps: 160, check_vertices: 6, half_width: 0.3, tol: 1e-8, seed: 5 }
    }
}

/// Vertices of a rooted integration tree with their values and the largest
/// gap between the direct segment and a two-leg path through a corner.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationTree {
    pub root: Vec<f64>,
    pub vertices: Vec<Vec<f64>>,
    pub values: Vec<CVec>,
    pub path_discrepancy: f64,
}

/// Generator of ψ' = (−Ω(γ̇) + iA(γ̇)⋆)ψ.
#[derive(Clone)]
struct ModifiedConnection {
    model: ManifoldModel,
    frame: MatrixField,
    module: Arc<SpinorModule>,
    a: EndomorphismField,
}

impl ModifiedConnection {
    fn generator(&self, p: &[f64], v: &DVector<f64>) -> Result<CMat> {
        let omega = spin_connection(&self.module, &self.model, &self.frame, p, v)?;
        let av = self.a.at(p) * v;
        let e = (self.frame)(p);
        let comps = e.lu().solve(&av).expect("frame is invertible");
        Ok(self.module.kappa(comps.as_slice()) * I - omega)
    }

    fn segment(&self, a: &[f64], b: &[f64], psi: &CVec, steps: usize) -> Result<CVec> {
        let pa = DVector::from_column_slice(a);
        let v = DVector::from_column_slice(b) - &pa;
        let at = |r: f64| -> Vec<f64> { (&pa + &v * r).as_slice().to_vec() };
        let h = 1.0 / steps as f64;
        let hc = C64::new(h, 0.0);
        let mut y = psi.clone();
        for k in 0..steps {
            let r = k as f64 * h;
            let k1 = self.generator(&at(r), &v)? * &y;
            let k2 = self.generator(&at(r + 0.5 * h), &v)? * (&y + &k1 * (hc * 0.5));
            let k3 = self.generator(&at(r + 0.5 * h), &v)? * (&y + &k2 * (hc * 0.5));
            let k4 = self.generator(&at(r + h), &v)? * (&y + &k3 * hc);
            y += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * (hc / 6.0);
        }
        Ok(y)
    }
}

/// Integrates ∇_Xψ = iA(X)⋆ψ from ψ(root) = ψ₀ along straight segments.
/// Path dependence above `opts.tol` on the check vertices means the pair
/// (A, ψ₀) is not integrable and gives `HolonomyObstruction`.
pub fn integrate_codazzi_spinor(
    model: &ManifoldModel,
    frame: &MatrixField,
    module: Arc<SpinorModule>,
    a: &EndomorphismField,
    root: &[f64],
    psi0: CVec,
    parity: Parity,
    opts: &IntegrationOptions,
) -> Result<(SpinorField, IntegrationTree)> {
    model.check_point(root, 4.0)?;
    let conn = ModifiedConnection { model: model.clone(), frame: frame.clone(), module: module.clone(), a: a.clone() };
    let mut rng = sampling::rng(opts.seed);
    let n = model.dim;
    let chart = model.chart.shrunk(0.02);
    let vertices: Vec<Vec<f64>> = (0..opts.check_vertices)
        .map(|_| {
            let d = sampling::random_vector(&mut rng, n);
            (0..n).map(|k| (root[k] + opts.half_width * d[k]).clamp(chart.lo[k], chart.hi[k])).collect()
        })
        .collect();
    let checks: Vec<(CVec, f64)> = vertices
        .par_iter()
        .map(|v| {
            let direct = conn.segment(root, v, &psi0, opts.steps)?;
            // Corner moved along the even coordinates only, so that the loop
            // spans mixed coordinate planes.
            let corner: Vec<f64> = (0..n).map(|k| if k % 2 == 0 { v[k] } else { root[k] }).collect();
            let mid = conn.segment(root, &corner, &psi0, opts.steps)?;
            let bent = conn.segment(&corner, v, &mid, opts.steps)?;
            let gap = cnorm(&(&direct - &bent)) / cnorm(&psi0);
            Ok((direct, gap))
        })
        .collect::<Result<_>>()?;
    let path_discrepancy = checks.iter().map(|c| c.1).fold(0.0, f64::max);
    if path_discrepancy > opts.tol {
        return Err(Error::HolonomyObstruction { discrepancy: path_discrepancy });
    }
    let tree = IntegrationTree {
        root: root.to_vec(),
        vertices,
        values: checks.into_iter().map(|c| c.0).collect(),
        path_discrepancy,
    };
    let (r, steps) = (root.to_vec(), opts.steps);
    let values: SpinorFn = Arc::new(move |p: &[f64]| conn.segment(&r, p, &psi0, steps));
    Ok((SpinorField::new(model.clone(), frame.clone(), module, parity, root.to_vec(), values), tree))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodazziSpinorReport {
    /// max over samples and frame directions of |∇_Xψ − iA(X)⋆ψ| / |ψ|.
    pub residual: f64,
    /// max |g(A e_a, e_b) − A_ab(ψ)| with A_ab(ψ) recovered from ∇ψ.
    pub recovery_residual: f64,
    pub min_norm: f64,
    pub samples: usize,
}

/// Residual of the Codazzi equation ∇_Xψ = iA(X)⋆ψ and of the recovery
/// g(A(X),Y) = −½ Im⟨X⋆∇_Yψ + Y⋆∇_Xψ, ψ⟩₀ / ‖ψ‖².
pub fn codazzi_spinor_residual(field: &SpinorField, a: &EndomorphismField, samples: &[Vec<f64>]) -> Result<CodazziSpinorReport> {
    let n = field.model.dim;
    let per: Vec<(f64, f64, f64)> = samples
        .par_iter()
        .map(|p| {
            let psi = field.at(p)?;
            let norm = cnorm(&psi);
            if norm < VANISHING_NORM {
                return Err(Error::VanishingSpinor { norm });
            }
            let parts = field.partials(p)?;
            let e = (field.frame)(p);
            let am = a.at(p);
            let mut nab = Vec::with_capacity(n);
            let mut res = 0.0_f64;
            for j in 0..n {
                let x = e.column(j).into_owned();
                let d = field.derivative_with(p, &psi, &parts, &x)?;
                let ax = field.frame_components(p, &(&am * &x));
                let r = &d - field.module.kappa(ax.as_slice()) * &psi * I;
                res = res.max(cnorm(&r) / norm);
                nab.push(d);
            }
            let g = field.model.metric(p);
            let expect = (&am * &e).transpose() * &g * &e;
            let mut rec = 0.0_f64;
            for j in 0..n {
                for k in 0..n {
                    let s = &field.module.kappas[j] * &nab[k] + &field.module.kappas[k] * &nab[j];
                    let val = -0.5 * psi.dotc(&s).im / (norm * norm);
                    rec = rec.max((val - expect[(j, k)]).abs());
                }
            }
            Ok((res, rec, norm))
        })
        .collect::<Result<_>>()?;
    Ok(CodazziSpinorReport {
        residual: per.iter().map(|x| x.0).fold(0.0, f64::max),
        recovery_residual: per.iter().map(|x| x.1).fold(0.0, f64::max),
        min_norm: per.iter().map(|x| x.2).fold(f64::INFINITY, f64::min),
        samples: samples.len(),
    })
}

/// Largest condition number accepted for A in [`phi_a_transfer`].
pub const TRANSFER_CONDITION_MAX: f64 = 1e10;

/// Φ_A: the same frame components read in the frame A⁻¹e_j, which is
/// orthonormal for A^*g. Clifford multiplication is intertwined as
/// Φ(X⋆φ) = A⁻¹(X)⋆Φ(φ).
pub fn phi_a_transfer(field: &SpinorField, a: &EndomorphismField) -> Result<SpinorField> {
    let am = a.at(&field.anchor);
    let cond = condition_number(&am);
    if !cond.is_finite() || cond > TRANSFER_CONDITION_MAX {
        return Err(Error::SingularA { condition: cond });
    }
    let model = pullback_model(&field.model, a);
    let (f, af) = (field.frame.clone(), a.field());
    let frame: MatrixField = Arc::new(move |p: &[f64]| {
        let m: DMatrix<f64> = af(p);
        m.lu().solve(&f(p)).unwrap_or_else(|| DMatrix::from_element(p.len(), p.len(), f64::NAN))
    });
    Ok(SpinorField::new(model, frame, field.module.clone(), field.parity, field.anchor.clone(), field.values().clone()))
}
