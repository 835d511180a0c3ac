//! Translation parts m_i of cylinder holonomy along fiber geodesics, and
//! the conjugation of holonomy under a Codazzi pullback.

use super::estimate::{ambrose_singer_span, HolonomyEstimate, HolonomyOptions};
use crate::cylinder::{adapted_basis, transport_az, CylinderModel};
use crate::error::{Error, Result};
use crate::geometry::{geodesic, riemann, transport_matrix, CurvePath, ManifoldModel, TransportOptions};
use crate::linalg::subspace_distance;
use crate::sampling;
use crate::warped::{pullback_model, EndomorphismField};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

/// Integration steps of each sampled fiber geodesic.
pub const GEODESIC_STEPS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct MProbeSample {
    /// Norm of the ℝP ∧ ÃTF_i part of τ_δ⁻¹ R^C(X, Y) τ_δ.
    pub projection: f64,
    /// P-coefficient of τ_δ⁻¹ R^C(X, Y) τ_δ (AZ) from the cylinder transport.
    pub generic: f64,
    /// 2 g_F(R^F(X, Y)γ̇(1), τ^F_γ Z).
    pub closed_form: f64,
    /// a(1) from integrating ȧ = 2g_F(γ̇⁻, Y) along the reversed geodesic.
    pub ode: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MProbe {
    pub factor: usize,
    pub samples: Vec<MProbeSample>,
    pub max_projection: f64,
    /// max |generic − closed form| and |ode − closed form|.
    pub formula_discrepancy: f64,
    pub ode_discrepancy: f64,
}

fn in_factor(rng: &mut sampling::SeededRng, m: usize, offset: usize, dim: usize) -> DVector<f64> {
    let mut v = DVector::zeros(m);
    v.rows_mut(offset, dim).copy_from(&sampling::random_vector(rng, dim));
    v
}

fn lift_fiber(v: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(v.len() + 2);
    out.rows_mut(2, v.len()).copy_from(v);
    out
}

/// Samples geodesics γ in factor `factor` of the fiber starting at `x` and
/// random X, Y ∈ T_{γ(1)}F_i, Z ∈ T_xF_i; the basepoint of C is (0, 0, x).
/// `factor_dims` lists the fiber factors in coordinate order.
pub fn m_nonvanishing_probe(
    cyl: &CylinderModel,
    x: &[f64],
    factor_dims: &[usize],
    factor: usize,
    samples: usize,
    seed: u64,
    opts: &TransportOptions,
) -> Result<MProbe> {
    let wp = cyl.warped_base()?;
    let fiber = &wp.fiber;
    let m = fiber.dim;
    if factor_dims.iter().sum::<usize>() != m || factor >= factor_dims.len() {
        return Err(Error::ConfigError(format!("factor {factor} of {factor_dims:?} does not fit a fiber of dimension {m}")));
    }
    let offset: usize = factor_dims[..factor].iter().sum();
    let dim = factor_dims[factor];
    let model = cyl.model();
    let mut q0 = vec![0.0, 0.0];
    q0.extend_from_slice(x);
    let e = adapted_basis(cyl, &q0)?;
    let einv = e.clone().try_inverse().ok_or(Error::SingularA { condition: f64::INFINITY })?;
    let hti0 = cyl.h_t_inv(0.0, &q0[1..])?;
    let mut rng = sampling::rng(seed);
    let draws: Vec<[DVector<f64>; 4]> = (0..samples)
        .map(|_| {
            let g = fiber.metric(x);
            let mut v0 = in_factor(&mut rng, m, offset, dim);
            v0 *= 0.3 / (v0.transpose() * &g * &v0)[(0, 0)].sqrt();
            [v0, in_factor(&mut rng, m, offset, dim), in_factor(&mut rng, m, offset, dim), in_factor(&mut rng, m, offset, dim)]
        })
        .collect();
    let out: Vec<MProbeSample> = draws
        .par_iter()
        .map(|[v0, xv, yv, z]| {
            let (xs, vs) = geodesic(fiber, x, v0, GEODESIC_STEPS)?;
            let y = xs.last().unwrap().clone();
            let gdot1 = vs.last().unwrap().clone();
            let curve_f = CurvePath::hermite(xs.clone(), vs.clone());
            let curve_c = CurvePath::hermite(xs.iter().map(lift_fiber).collect(), vs.iter().map(lift_fiber).collect());
            let tau_f = transport_matrix(fiber, &curve_f, opts)?.matrix;
            let tau_c = transport_matrix(&model, &curve_c, opts)?.matrix;
            let tau_c_inv = tau_c.clone().try_inverse().ok_or(Error::SingularA { condition: f64::INFINITY })?;
            let q1 = curve_c.end();
            let rc = riemann(&model, q1.as_slice())?.endomorphism(&lift_fiber(xv), &lift_fiber(yv));
            let gen = &tau_c_inv * rc * &tau_c;
            let adapted = &einv * &gen * &e;
            let cols = 1 + offset..1 + offset + dim;
            let projection = adapted.view((0, cols.start), (1, cols.len())).norm();
            let az = cyl.lift(&(&hti0 * wp.lift(z)));
            let generic = (&einv * (&gen * az))[0];
            let rf = riemann(fiber, y.as_slice())?;
            let tz = &tau_f * z;
            let closed_form = 2.0 * (rf.apply(xv, yv, &gdot1).transpose() * fiber.metric(y.as_slice()) * &tz)[(0, 0)];
            let zhat = rf.apply(xv, yv, &tz);
            let ode = *transport_az(cyl, &curve_c.reversed(), &zhat, opts)?.a.last().unwrap();
            Ok(MProbeSample { projection, generic, closed_form, ode })
        })
        .collect::<Result<_>>()?;
    let max_projection = out.iter().map(|s| s.projection).fold(0.0, f64::max);
    let formula_discrepancy = out.iter().map(|s| (s.generic - s.closed_form).abs()).fold(0.0, f64::max);
    let ode_discrepancy = out.iter().map(|s| (s.ode - s.closed_form).abs()).fold(0.0, f64::max);
    Ok(MProbe { factor, samples: out, max_projection, formula_discrepancy, ode_discrepancy })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugationCheck {
    pub original: HolonomyEstimate,
    pub pulled_back: HolonomyEstimate,
    /// Distance between span(A⁻¹ B A) and the pulled-back estimate.
    pub span_distance: f64,
}

impl ConjugationCheck {
    pub fn matches(&self, tol: f64) -> bool {
        self.original.dimension == self.pulled_back.dimension && self.span_distance <= tol
    }
}

/// Holonomy of (M, A^*g) against A⁻¹ hol(M, g) A at `basepoint`.
pub fn conjugation_check(g: &ManifoldModel, a: &EndomorphismField, basepoint: &[f64], opts: &HolonomyOptions) -> Result<ConjugationCheck> {
    let original = ambrose_singer_span(g, basepoint, opts)?;
    let pulled_back = ambrose_singer_span(&pullback_model(g, a), basepoint, opts)?;
    let ap = a.at(basepoint);
    let api = ap.clone().try_inverse().ok_or(Error::SingularA { condition: f64::INFINITY })?;
    let flat = |mats: Vec<DMatrix<f64>>| {
        let cols: Vec<DVector<f64>> = mats.iter().map(|m| DVector::from_column_slice(m.as_slice())).collect();
        DMatrix::from_columns(&cols)
    };
    let span_distance = if original.dimension == 0 || pulled_back.dimension == 0 {
        if original.dimension == pulled_back.dimension {
            0.0
        } else {
            1.0
        }
    } else {
        let conj = crate::linalg::column_span(&flat(original.basis.iter().map(|b| &api * b * &ap).collect()), 1e-8);
        subspace_distance(&conj, &flat(pulled_back.basis.clone()))
    };
    Ok(ConjugationCheck { original, pulled_back, span_distance })
}
