//! The lightlike fields P, Q on C[F;H] and the closed-form parallel
//! transport of H⁻¹Z.

use super::model::CylinderModel;
use crate::error::{Error, Result};
use crate::geometry::{christoffel, christoffel_unchecked, covariant_derivative, transport_matrix, CurvePath, TransportOptions};
use crate::geometry::rk4_linear;
use nalgebra::{DMatrix, DVector};

fn hti_es(cyl: &CylinderModel, q: &[f64]) -> Result<DVector<f64>> {
    let hti = cyl.h_t_inv(q[0], &q[1..])?;
    Ok(cyl.lift(&hti.column(0).into_owned()))
}

/// P = e^{-2s}(∂_t − H_t⁻¹∂_s) at q = (t, s, x).
pub fn p_field(cyl: &CylinderModel, q: &[f64]) -> Result<DVector<f64>> {
    cyl.warped_base()?;
    Ok((cyl.dt() - hti_es(cyl, q)?) * (-2.0 * q[1]).exp())
}

/// Q = −½e^{2s}(∂_t + H_t⁻¹∂_s), normalized so that g_C(P, Q) = 1.
pub fn q_field(cyl: &CylinderModel, q: &[f64]) -> Result<DVector<f64>> {
    cyl.warped_base()?;
    Ok((cyl.dt() + hti_es(cyl, q)?) * (-0.5 * (2.0 * q[1]).exp()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PqSample {
    pub point: Vec<f64>,
    pub p: DVector<f64>,
    pub q: DVector<f64>,
    pub g_pp: f64,
    pub g_qq: f64,
    pub g_pq: f64,
    /// max over coordinate directions of |∇^C_{∂_i} P|.
    pub parallel_residual: f64,
}

pub fn pq_fields(cyl: &CylinderModel, q: &[f64]) -> Result<PqSample> {
    let model = cyl.model();
    let p = p_field(cyl, q)?;
    let qq = q_field(cyl, q)?;
    let g = model.metric(q);
    let ip = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * &g * b)[(0, 0)];
    let mut worst = 0.0_f64;
    for i in 0..cyl.dim() {
        let mut e = DVector::zeros(cyl.dim());
        e[i] = 1.0;
        let d = covariant_derivative(&model, q, &e, &|q2: &[f64]| p_field(cyl, q2).expect("checked base"))?;
        worst = worst.max(d.amax());
    }
    Ok(PqSample { point: q.to_vec(), g_pp: ip(&p, &p), g_qq: ip(&qq, &qq), g_pq: ip(&p, &qq), p, q: qq, parallel_residual: worst })
}

/// |τP(start) − P(end)| along `curve` using the generic integrator.
pub fn p_transport_defect(cyl: &CylinderModel, curve: &CurvePath, opts: &TransportOptions) -> Result<f64> {
    let model = cyl.model();
    let t = transport_matrix(&model, curve, opts)?;
    let a = curve.start();
    let b = curve.end();
    let moved = t.matrix * p_field(cyl, a.as_slice())?;
    Ok((moved - p_field(cyl, b.as_slice())?).amax())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AzTransport {
    /// a(1) P + e^{2s}H_t⁻¹Y(1) at the end of the curve.
    pub closed_form: DVector<f64>,
    /// Generic transport of H⁻¹Z.
    pub generic: DVector<f64>,
    /// a at the curve nodes r = k/steps.
    pub a: Vec<f64>,
    /// Fiber transport Y(1) of Z.
    pub y: DVector<f64>,
    pub discrepancy: f64,
}

/// Transport of AZ = H⁻¹Z from δ(0) = (0, 0, x) along δ = (t, s, γ): the
/// closed form a(r)P + e^{2s(r)}H_t⁻¹Y(r) with Y the fiber transport of Z
/// along γ and ȧ = 2g_F(Y, γ̇), against the generic transport on g_C.
pub fn transport_az(cyl: &CylinderModel, curve: &CurvePath, z: &DVector<f64>, opts: &TransportOptions) -> Result<AzTransport> {
    let wp = cyl.warped_base()?.clone();
    let start = curve.start();
    if start[0].abs() > 1e-12 || start[1].abs() > 1e-12 {
        return Err(Error::OutOfChart { point: start.as_slice().to_vec(), margin: -start[0].abs().max(start[1].abs()) });
    }
    let m = wp.fiber.dim;
    let mut state = DVector::zeros(m + 1);
    state.rows_mut(0, m).copy_from(z);
    let mut a = vec![0.0];
    for piece in &curve.pieces {
        let steps = ((opts.steps_per_unit * piece.length).ceil() as usize).max(opts.min_steps);
        for k in 0..steps {
            let (r0, r1) = (k as f64 / steps as f64, (k + 1) as f64 / steps as f64);
            let h = r1 - r0;
            // One RK4 step on [r0, r1] of (Y, a)' = M(r)(Y, a).
            state = rk4_linear(state, 1, |u, y: &DVector<f64>| {
                let r = r0 + u * h;
                let pos = (piece.position)(r);
                let vel = (piece.velocity)(r);
                let x = &pos.as_slice()[2..];
                let gdot = vel.rows(2, m).into_owned();
                let gam = christoffel_unchecked(&wp.fiber, x)?;
                let yv = y.rows(0, m).into_owned();
                let mut out = DVector::zeros(m + 1);
                out.rows_mut(0, m).copy_from(&(-gam.contract(&gdot, &yv) * h));
                out[m] = 2.0 * (yv.transpose() * wp.fiber.metric(x) * &gdot)[(0, 0)] * h;
                Ok(out)
            })?;
            a.push(state[m]);
        }
    }
    let end = curve.end();
    let qe = end.as_slice();
    let y = state.rows(0, m).into_owned();
    let hti = cyl.h_t_inv(qe[0], &qe[1..])?;
    let closed_form = p_field(cyl, qe)? * state[m] + cyl.lift(&(hti * wp.lift(&y))) * (2.0 * qe[1]).exp();
    let model = cyl.model();
    christoffel(&model, start.as_slice())?;
    let t = transport_matrix(&model, curve, opts)?;
    let h0 = cyl.h_t_inv(0.0, &start.as_slice()[1..])?;
    let az = cyl.lift(&(h0 * wp.lift(z)));
    let generic = t.matrix * az;
    let discrepancy = (&closed_form - &generic).amax();
    Ok(AzTransport { closed_form, generic, a, y, discrepancy })
}

/// Matrix of the propagator in the basis (P, H⁻¹v_1, …, H⁻¹v_m, Q) at a
/// point with t = 0; `v_a` is a g_F-orthonormal basis of the fiber.
pub fn adapted_basis(cyl: &CylinderModel, q: &[f64]) -> Result<DMatrix<f64>> {
    let wp = cyl.warped_base()?;
    let m = wp.fiber.dim;
    let x = &q[2..];
    let on = crate::warped::orthonormal_basis(&wp.fiber.metric(x));
    let hti = cyl.h_t_inv(q[0], &q[1..])?;
    let mut cols = vec![p_field(cyl, q)?];
    for a in 0..m {
        cols.push(cyl.lift(&(&hti * wp.lift(&on.column(a).into_owned()))) * (2.0 * q[1]).exp());
    }
    cols.push(q_field(cyl, q)?);
    Ok(DMatrix::from_columns(&cols))
}
