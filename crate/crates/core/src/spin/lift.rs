//! Extension of a Codazzi spinor to the Lorentzian cylinder along the
//! t-lines and its Dirac current.

use super::clifford::{cnorm, CMat, CVec, C64, I};
use super::connection::{frame_one_form, spin_lift};
use super::current::dirac_current;
use super::field::{codazzi_spinor_residual, SpinorField};
use super::killing::local_samples;
use crate::cylinder::CylinderModel;
use crate::error::{Error, Result};
use crate::geometry::{christoffel, ManifoldModel, MatrixField};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::sync::Arc;

/// g(V,V) below −CAUSAL_TOL·‖ψ‖⁴ counts as timelike.
pub const CAUSAL_TOL: f64 = 1e-6;
/// dist above this counts as positive.
pub const DIST_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalType {
    Timelike,
    Lightlike,
    Spacelike,
}

impl CausalType {
    pub fn as_str(&self) -> &'static str {
        match self {
            CausalType::Timelike => "timelike",
            CausalType::Lightlike => "lightlike",
            CausalType::Spacelike => "spacelike",
        }
    }
}

/// ψ̃(t, x) with the components of ψ(x) in the frame (∂_t, H_t⁻¹H e_j).
#[derive(Clone, Debug)]
pub struct CylinderSpinor {
    pub cyl: CylinderModel,
    pub base: SpinorField,
    pub model: ManifoldModel,
    frame: MatrixFieldDebug,
}

#[derive(Clone)]
struct MatrixFieldDebug(MatrixField);

impl std::fmt::Debug for MatrixFieldDebug {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("frame")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderCurrent {
    pub point: Vec<f64>,
    /// V in chart components (t first).
    pub v: DVector<f64>,
    pub g_vv: f64,
    pub norm_sq: f64,
}

/// Extends ψ along the t-lines without checking the Codazzi condition.
pub fn extend_to_cylinder(cyl: &CylinderModel, field: &SpinorField) -> Result<CylinderSpinor> {
    if field.model.dim != cyl.base.dim {
        return Err(Error::FixtureError("spinor and cylinder base dimensions differ".into()));
    }
    let p = &field.anchor;
    let gap = (field.model.metric(p) - cyl.slice_metric(0.0, p)).amax();
    if gap > 1e-8 {
        return Err(Error::FixtureError(format!("spinor metric differs from the t = 0 slice by {gap:.3e}")));
    }
    let (c, bf) = (cyl.clone(), field.frame.clone());
    let frame: MatrixField = Arc::new(move |q: &[f64]| {
        let n = q.len();
        let x = &q[1..];
        let mut e = DMatrix::zeros(n, n);
        e[(0, 0)] = 1.0;
        let m = c.h_t(q[0], x).lu().solve(&(c.h.at(x) * bf(x))).unwrap_or_else(|| DMatrix::from_element(n - 1, n - 1, f64::NAN));
        e.view_mut((1, 1), (n - 1, n - 1)).copy_from(&m);
        e
    });
    Ok(CylinderSpinor { cyl: cyl.clone(), base: field.clone(), model: cyl.model(), frame: MatrixFieldDebug(frame) })
}

impl CylinderSpinor {
    pub fn frame_at(&self, q: &[f64]) -> DMatrix<f64> {
        (self.frame.0)(q)
    }

    pub fn at(&self, q: &[f64]) -> Result<CVec> {
        self.base.at(&q[1..])
    }

    fn gammas(&self) -> (&[CMat], &[f64]) {
        (&self.base.module.rep.gammas, &self.base.module.rep.eta)
    }

    /// Lorentzian spin connection matrix Ω^C(x).
    pub fn connection(&self, q: &[f64], x: &DVector<f64>) -> Result<CMat> {
        let w = frame_one_form(&self.model, &self.frame.0, q, x)?;
        let (g, eta) = self.gammas();
        Ok(spin_lift(g, eta, &w))
    }

    /// ∇^C_x ψ̃; the components do not depend on t.
    pub fn derivative_with(&self, q: &[f64], psi: &CVec, base_partials: &[CVec], x: &DVector<f64>) -> Result<CVec> {
        let mut out = self.connection(q, x)? * psi;
        for (k, d) in base_partials.iter().enumerate() {
            if x[k + 1] != 0.0 {
                out += d * C64::new(x[k + 1], 0.0);
            }
        }
        Ok(out)
    }

    /// max over frame directions of |∇^C_{e_a}ψ̃| / |ψ̃|.
    pub fn parallel_residual(&self, q: &[f64]) -> Result<f64> {
        let psi = self.at(q)?;
        let parts = self.base.partials(&q[1..])?;
        let e = self.frame_at(q);
        let mut worst = 0.0_f64;
        for a in 0..e.ncols() {
            let d = self.derivative_with(q, &psi, &parts, &e.column(a).into_owned())?;
            worst = worst.max(cnorm(&d) / cnorm(&psi));
        }
        Ok(worst)
    }

    /// At t = 0: max_j |∇^C_{e_j}ψ̃ − (∇^M_{e_j}ψ − iA(e_j)⋆ψ)| / |ψ| with
    /// A = H⁻¹.
    pub fn slice_identity_residual(&self, x: &[f64]) -> Result<f64> {
        let mut q = vec![0.0];
        q.extend(x);
        let psi = self.base.at(x)?;
        let parts = self.base.partials(x)?;
        let e = (self.base.frame)(x);
        let a = self.cyl.h.at(x).try_inverse().ok_or(Error::SingularA { condition: f64::INFINITY })?;
        let mut worst = 0.0_f64;
        for j in 0..e.ncols() {
            let ej = e.column(j).into_owned();
            let lhs = self.derivative_with(&q, &psi, &parts, &self.cyl.lift(&ej))?;
            let base = self.base.derivative_with(x, &psi, &parts, &ej)?;
            let rhs = base - self.base.clifford(x, &(&a * &ej)) * &psi * I;
            worst = worst.max(cnorm(&(lhs - rhs)) / cnorm(&psi));
        }
        Ok(worst)
    }

    /// Dirac current g(V, Y) = −⟨Y•ψ̃, ψ̃⟩₁.
    pub fn current(&self, q: &[f64]) -> Result<CylinderCurrent> {
        let psi = self.at(q)?;
        let (g, eta) = self.gammas();
        let g0 = &g[0];
        let vf = DVector::from_fn(g.len(), |a, _| eta[a] * -(psi.dotc(&(g0 * &g[a] * &psi))).re);
        let v = self.frame_at(q) * vf;
        let gm = self.model.metric(q);
        let g_vv = (v.transpose() * &gm * &v)[(0, 0)];
        Ok(CylinderCurrent { point: q.to_vec(), v, g_vv, norm_sq: cnorm(&psi).powi(2) })
    }

    /// max over chart directions of |∇^C V| at q.
    pub fn current_parallel_residual(&self, q: &[f64]) -> Result<f64> {
        let n = q.len();
        let gam = christoffel(&self.model, q)?;
        let here = self.current(q)?.v;
        let mut p = q.to_vec();
        let mut worst = 0.0_f64;
        for k in 0..n {
            let h = self.model.fd.h(k);
            let mut dv = DVector::zeros(n);
            for (off, c) in [(2.0, -1.0), (1.0, 8.0), (-1.0, -8.0), (-2.0, 1.0)] {
                p[k] = q[k] + off * h;
                dv += self.current(&p)?.v * (c / (12.0 * h));
            }
            p[k] = q[k];
            let mut x = DVector::zeros(n);
            x[k] = 1.0;
            worst = worst.max((dv + gam.contract(&x, &here)).amax());
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftOptions {
    pub codazzi_tol: f64,
    /// Base points around the spinor's anchor.
    pub samples: usize,
    pub half_width: f64,
    /// Slices as fractions of the t window: t = f·hi for f > 0, −f·lo otherwise.
    pub t_fractions: Vec<f64>,
    pub seed: u64,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions { codazzi_tol: 1e-6, samples: 3, half_width: 0.25, t_fractions: vec![-0.5, 0.0, 0.5], seed: 17 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftReport {
    pub codazzi_residual: f64,
    /// max |∇^C ψ̃| / |ψ̃| over samples and frame directions.
    pub parallel_residual: f64,
    /// max |∇^C V|.
    pub current_parallel_residual: f64,
    /// max |g(V,V) + q_ψ|.
    pub norm_residual: f64,
    /// max |V − (‖ψ‖²∂_t + W̃)|.
    pub decomposition_residual: f64,
    /// Smallest dt-component of V.
    pub min_time_component: f64,
    /// Largest g(V,V) / ‖ψ‖⁴.
    pub max_causal_ratio: f64,
    pub q: f64,
    pub dist: f64,
    /// Type read off g(V,V).
    pub causal_type: CausalType,
    /// Type read off dist_ψ.
    pub dist_type: CausalType,
    pub samples: usize,
}

/// Extends a Codazzi spinor for A = H⁻¹ to the cylinder and checks that
/// the extension and its Dirac current are parallel. `NotCodazzi` if the
/// residual exceeds `opts.codazzi_tol`.
pub fn lift_to_cylinder(cyl: &CylinderModel, field: &SpinorField, opts: &LiftOptions) -> Result<(CylinderSpinor, LiftReport)> {
    let base_pts = local_samples(&field.model, &field.anchor, opts.half_width, opts.samples, opts.seed);
    let a = cyl.h.inverse();
    let cod = codazzi_spinor_residual(field, &a, &base_pts)?;
    if cod.residual > opts.codazzi_tol {
        return Err(Error::NotCodazzi { residual: cod.residual });
    }
    let lifted = extend_to_cylinder(cyl, field)?;
    let (lo, hi) = cyl.t_window;
    let ts: Vec<f64> = opts.t_fractions.iter().map(|&f| if f > 0.0 { f * hi.min(1.0) } else { -f * lo.max(-1.0) }).collect();
    let mut pts = Vec::new();
    for &t in &ts {
        for x in &base_pts {
            let mut q = vec![t];
            q.extend(x);
            pts.push(q);
        }
    }
    let per: Vec<[f64; 7]> = pts
        .par_iter()
        .map(|q| {
            let x = &q[1..];
            let par = lifted.parallel_residual(q)?;
            let vpar = lifted.current_parallel_residual(q)?;
            let cur = lifted.current(q)?;
            let base = dirac_current(field, x)?;
            let hti = cyl.h_t_inv(q[0], x)?;
            let mut expect = cyl.lift(&(hti * cyl.h.at(x) * &base.w));
            expect[0] += base.norm_sq;
            let dec = (&cur.v - expect).amax();
            Ok([par, vpar, (cur.g_vv + base.q_value).abs(), dec, cur.v[0], cur.g_vv / cur.norm_sq.powi(2), base.q_value])
        })
        .collect::<Result<_>>()?;
    let dists: Vec<f64> = base_pts.iter().map(|x| dirac_current(field, x).map(|c| c.dist_value)).collect::<Result<_>>()?;
    let max = |i: usize| per.iter().map(|r| r[i]).fold(f64::NEG_INFINITY, f64::max);
    let q = per.iter().map(|r| r[6]).sum::<f64>() / per.len() as f64;
    let dist = dists.iter().cloned().fold(0.0, f64::max);
    let ratio = max(5);
    let causal_type = if ratio > CAUSAL_TOL {
        CausalType::Spacelike
    } else if ratio < -CAUSAL_TOL {
        CausalType::Timelike
    } else {
        CausalType::Lightlike
    };
    let dist_type = if dist > DIST_TOL { CausalType::Timelike } else { CausalType::Lightlike };
    let report = LiftReport {
        codazzi_residual: cod.residual,
        parallel_residual: max(0),
        current_parallel_residual: max(1),
        norm_residual: max(2),
        decomposition_residual: max(3),
        min_time_component: per.iter().map(|r| r[4]).fold(f64::INFINITY, f64::min),
        max_causal_ratio: ratio,
        q,
        dist,
        causal_type,
        dist_type,
        samples: pts.len(),
    };
    Ok((lifted, report))
}
