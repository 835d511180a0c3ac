//! Closed-form connection and curvature identities of the cylinder, each
//! compared with the chart-level Christoffel/Riemann evaluation of g_C.

use super::model::CylinderModel;
use super::pq::{p_field, q_field};
use crate::error::Result;
use crate::geometry::{central_difference, christoffel, covariant_derivative, riemann, ManifoldModel};
use crate::sampling::{self, SeededRng};
use crate::warped::WarpedProductModel;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

pub const FIRST_ORDER_TOL: f64 = 1e-6;
pub const SECOND_ORDER_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CylinderIdentity {
    /// W_t = 2H_t⁻¹ and g_t(W_t X, Y) = −½ġ_t(X, Y).
    P1,
    /// ∇^C_X Y = H_t⁻¹∇^b_X(H_t Y) − 2g_b(H_t X, Y)∂_t.
    P2,
    /// ∇^C_X ∂_t = −2H_t⁻¹X.
    P3,
    /// ∇^C_{∂_t} X = −2H_t⁻¹X.
    P4,
    /// ∇^C_{∂_t} ∂_t = 0.
    P5,
    /// H_t⁻¹Z is parallel along t-lines.
    P6,
    /// ∇^C_{∂_s}(H_t⁻¹∂_s) = −2∂_t.
    P7,
    /// ∇^C_{∂_s}(H_t⁻¹V) = −2H_t⁻¹V.
    P8,
    /// ∇^C_V(H_t⁻¹∂_s) = −2H_t⁻¹V.
    P9,
    /// ∇^C_V(H_t⁻¹W) = −2f²g_F(V,W)(∂_t − H_t⁻¹∂_s) + H_t⁻¹∇^F_V W.
    P10,
    /// R^b(X,Y)U = R^F(X,Y)U + 4g(X,U)Y − 4g(Y,U)X.
    P12,
    /// R^b(∂_s,Y)U = −4f²g_F(Y,U)∂_s.
    P13,
    /// R^b(∂_s,Y)∂_s = 4Y.
    P14,
    /// R^b(X,Y)∂_s = 0.
    P15,
    /// R^C(X,Y)∂_t = R^C(X,∂_t)Y = R^C(X,∂_t)∂_t = 0.
    TimeAnnihilation,
    /// R^C(X,Y)V = H_t⁻¹R^b(X,Y)H_tV − 4g_b(X,H_tV)H_t⁻¹Y + 4g_b(Y,H_tV)H_t⁻¹X.
    Curv1,
    /// R^C(X,Y)H_t⁻¹V = H_t⁻¹R^F(X,Y)V.
    Curv2,
    /// R^C(X,Y)H_t⁻¹∂_s = R^C(∂_s,Y)H_t⁻¹∂_s = R^C(∂_s,Y)H_t⁻¹X = 0.
    Curv3,
    /// (H_t⁻¹)˙ = 2H_t⁻².
    InverseDerivative,
    /// Gram matrix of (P, H_t⁻¹TF, Q).
    Decomposition,
}

use CylinderIdentity::*;

impl CylinderIdentity {
    pub const ALL: [CylinderIdentity; 20] = [
        P1,
        P2,
        P3,
        P4,
        P5,
        P6,
        P7,
        P8,
        P9,
        P10,
        P12,
        P13,
        P14,
        P15,
        TimeAnnihilation,
        Curv1,
        Curv2,
        Curv3,
        InverseDerivative,
        Decomposition,
    ];

    pub fn id(self) -> &'static str {
        match self {
            P1 => "P1",
            P2 => "P2",
            P3 => "P3",
            P4 => "P4",
            P5 => "P5",
            P6 => "P6",
            P7 => "P7",
            P8 => "P8",
            P9 => "P9",
            P10 => "P10",
            P12 => "P12",
            P13 => "P13",
            P14 => "P14",
            P15 => "P15",
            TimeAnnihilation => "curv0",
            Curv1 => "curv1",
            Curv2 => "curv2",
            Curv3 => "curv3",
            InverseDerivative => "Hinv-dot",
            Decomposition => "PQ-gram",
        }
    }

    pub fn from_id(s: &str) -> Option<CylinderIdentity> {
        Self::ALL.iter().copied().find(|c| c.id() == s)
    }

    /// Needs the designated warped base.
    pub fn needs_warped(self) -> bool {
        matches!(self, P7 | P8 | P9 | P10 | P12 | P13 | P14 | P15 | Curv2 | Curv3 | Decomposition)
    }

    pub fn is_curvature(self) -> bool {
        matches!(self, P12 | P13 | P14 | P15 | TimeAnnihilation | Curv1 | Curv2 | Curv3)
    }

    pub fn tol(self) -> f64 {
        if self.is_curvature() {
            SECOND_ORDER_TOL
        } else {
            FIRST_ORDER_TOL
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub identity: CylinderIdentity,
    pub configurations: usize,
    pub max_residual: f64,
    pub tol: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tol
    }
}

/// |a − b|∞ / (1 + |b|∞).
pub fn rel_residual(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).amax() / (1.0 + b.amax())
}

fn rel_mat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / (1.0 + b.amax())
}

/// Affine vector field v0 + B(p − p0) on a chart of dimension `n`.
#[derive(Debug, Clone)]
struct AffineField {
    p0: Vec<f64>,
    v0: DVector<f64>,
    b: DMatrix<f64>,
}

impl AffineField {
    fn random(rng: &mut SeededRng, p0: &[f64]) -> Self {
        let n = p0.len();
        AffineField {
            p0: p0.to_vec(),
            v0: sampling::random_vector(rng, n),
            b: DMatrix::from_fn(n, n, |_, _| 0.3 * sampling::random_vector(rng, 1)[0]),
        }
    }

    fn at(&self, p: &[f64]) -> DVector<f64> {
        let d = DVector::from_iterator(p.len(), p.iter().zip(&self.p0).map(|(a, b)| a - b));
        &self.v0 + &self.b * d
    }
}

struct Config<'a> {
    cyl: &'a CylinderModel,
    model: &'a ManifoldModel,
    q: Vec<f64>,
}

impl<'a> Config<'a> {
    fn t(&self) -> f64 {
        self.q[0]
    }
    fn p(&self) -> &[f64] {
        &self.q[1..]
    }
    fn x(&self) -> &[f64] {
        &self.q[2..]
    }
    fn nb(&self) -> usize {
        self.cyl.base.dim
    }
    fn wp(&self) -> &WarpedProductModel {
        self.cyl.warped.as_ref().expect("warped base checked by caller")
    }
    fn lift(&self, v: &DVector<f64>) -> DVector<f64> {
        self.cyl.lift(v)
    }
    /// Fiber vector to a C vector (0, 0, v).
    fn lift_fiber(&self, v: &DVector<f64>) -> DVector<f64> {
        self.cyl.lift(&self.wp().lift(v))
    }
    fn base_es(&self) -> DVector<f64> {
        let mut e = DVector::zeros(self.nb());
        e[0] = 1.0;
        e
    }
    fn hti(&self) -> Result<DMatrix<f64>> {
        self.cyl.h_t_inv(self.t(), self.p())
    }
    /// C-vector field q ↦ (0, H_t(q)⁻¹ v(q)).
    fn hti_field<'b>(&'b self, v: &'b dyn Fn(&[f64]) -> DVector<f64>) -> impl Fn(&[f64]) -> DVector<f64> + 'b {
        move |q: &[f64]| {
            let m = self.cyl.h_t_inv(q[0], &q[1..]).expect("H_t invertible near the sample");
            self.cyl.lift(&(m * v(q)))
        }
    }
}

fn identity_residual(cfg: &Config, id: CylinderIdentity, rng: &mut SeededRng) -> Result<f64> {
    let cyl = cfg.cyl;
    let model = cfg.model;
    let (t, p, q) = (cfg.t(), cfg.p(), cfg.q.as_slice());
    let nb = cfg.nb();
    let dt = cyl.dt();
    let r = match id {
        P1 => {
            let gam = christoffel(model, q)?;
            let x = sampling::random_vector(rng, nb);
            let y = sampling::random_vector(rng, nb);
            let w = -gam.contract(&cfg.lift(&x), &dt);
            let closed = cfg.lift(&(cyl.weingarten(t, p)? * &x));
            let a = rel_residual(&w, &closed);
            let gdot = central_difference(|s| cyl.slice_metric(s[0], p), &[t], 0, 1e-4);
            let gt = cyl.slice_metric(t, p);
            let wx = w.rows(1, nb).into_owned();
            let lhs = (wx.transpose() * &gt * &y)[(0, 0)];
            let rhs = -0.5 * (x.transpose() * gdot * &y)[(0, 0)];
            a.max((lhs - rhs).abs() / (1.0 + rhs.abs()))
        }
        P2 => {
            let xf = AffineField::random(rng, p);
            let yf = AffineField::random(rng, p);
            let xv = xf.at(p);
            let lhs = covariant_derivative(model, q, &cfg.lift(&xv), &|q2: &[f64]| cyl.lift(&yf.at(&q2[1..])))?;
            let hty = |p2: &[f64]| cyl.h_t(t, p2) * yf.at(p2);
            let nb_hty = covariant_derivative(&cyl.base, p, &xv, &hty)?;
            let g = cyl.base.metric(p);
            let ht = cyl.h_t(t, p);
            let coef = ((ht * &xv).transpose() * g * yf.at(p))[(0, 0)];
            let rhs = cfg.lift(&(cfg.hti()? * nb_hty)) - &dt * (2.0 * coef);
            rel_residual(&lhs, &rhs)
        }
        P3 => {
            let x = sampling::random_vector(rng, nb);
            let lhs = covariant_derivative(model, q, &cfg.lift(&x), &|_q2: &[f64]| cyl.dt())?;
            rel_residual(&lhs, &(cfg.lift(&(cfg.hti()? * &x)) * -2.0))
        }
        P4 => {
            let yf = AffineField::random(rng, p);
            let lhs = covariant_derivative(model, q, &dt, &|q2: &[f64]| cyl.lift(&yf.at(&q2[1..])))?;
            rel_residual(&lhs, &(cfg.lift(&(cfg.hti()? * yf.at(p))) * -2.0))
        }
        P5 => {
            let lhs = covariant_derivative(model, q, &dt, &|_q2: &[f64]| cyl.dt())?;
            lhs.amax()
        }
        P6 => {
            let z = sampling::random_vector(rng, nb);
            let zf = move |_q2: &[f64]| z.clone();
            let field = cfg.hti_field(&zf);
            let lhs = covariant_derivative(model, q, &dt, &field)?;
            lhs.amax() / (1.0 + field(q).amax())
        }
        P7 => {
            let es = cfg.base_es();
            let esf = move |_q2: &[f64]| es.clone();
            let field = cfg.hti_field(&esf);
            let lhs = covariant_derivative(model, q, &cfg.lift(&cfg.base_es()), &field)?;
            rel_residual(&lhs, &(&dt * -2.0))
        }
        P8 => {
            let wf = AffineField::random(rng, cfg.x());
            let wp = cfg.wp().clone();
            let vf = move |q2: &[f64]| wp.lift(&wf.at(&q2[2..]));
            let field = cfg.hti_field(&vf);
            let lhs = covariant_derivative(model, q, &cfg.lift(&cfg.base_es()), &field)?;
            rel_residual(&lhs, &(field(q) * -2.0))
        }
        P9 => {
            let v = sampling::random_vector(rng, nb - 1);
            let es = cfg.base_es();
            let esf = move |_q2: &[f64]| es.clone();
            let field = cfg.hti_field(&esf);
            let lhs = covariant_derivative(model, q, &cfg.lift_fiber(&v), &field)?;
            let rhs = cfg.lift(&(cfg.hti()? * cfg.wp().lift(&v))) * -2.0;
            rel_residual(&lhs, &rhs)
        }
        P10 => {
            let wp = cfg.wp().clone();
            let x = cfg.x();
            let vf = AffineField::random(rng, x);
            let wf = AffineField::random(rng, x);
            let v = vf.at(x);
            let wfc = wf.clone();
            let wp2 = wp.clone();
            let wlift = move |q2: &[f64]| wp2.lift(&wfc.at(&q2[2..]));
            let field = cfg.hti_field(&wlift);
            let lhs = covariant_derivative(model, q, &cfg.lift_fiber(&v), &field)?;
            let gf = wp.fiber.metric(x);
            let f = wp.f(q[1]);
            let coef = -2.0 * f * f * (v.transpose() * gf * wf.at(x))[(0, 0)];
            let hti = cfg.hti()?;
            let nabla_f = covariant_derivative(&wp.fiber, x, &v, &|x2: &[f64]| wf.at(x2))?;
            let rhs = (&dt - cfg.lift(&(&hti * cfg.base_es()))) * coef + cfg.lift(&(&hti * wp.lift(&nabla_f)));
            rel_residual(&lhs, &rhs)
        }
        P12 | P13 | P14 | P15 => {
            let wp = cfg.wp();
            let rb = riemann(&cyl.base, p)?;
            let m = nb - 1;
            let (xv, yv, uv) = (sampling::random_vector(rng, m), sampling::random_vector(rng, m), sampling::random_vector(rng, m));
            let (x, y, u) = (wp.lift(&xv), wp.lift(&yv), wp.lift(&uv));
            let es = cfg.base_es();
            let g = cyl.base.metric(p);
            let ip = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * &g * b)[(0, 0)];
            match id {
                P12 => {
                    let rf = riemann(&wp.fiber, cfg.x())?;
                    let rhs = wp.lift(&rf.apply(&xv, &yv, &uv)) + &y * (4.0 * ip(&x, &u)) - &x * (4.0 * ip(&y, &u));
                    rel_residual(&rb.apply(&x, &y, &u), &rhs)
                }
                P13 => {
                    let f = wp.f(p[0]);
                    let gf = wp.fiber.metric(cfg.x());
                    let rhs = &es * (-4.0 * f * f * (yv.transpose() * gf * &uv)[(0, 0)]);
                    rel_residual(&rb.apply(&es, &y, &u), &rhs)
                }
                P14 => rel_residual(&rb.apply(&es, &y, &es), &(&y * 4.0)),
                _ => rb.apply(&x, &y, &es).amax() / (1.0 + x.amax() * y.amax()),
            }
        }
        TimeAnnihilation => {
            let rc = riemann(model, q)?;
            let n = cyl.dim();
            let x = sampling::random_vector(rng, n);
            let y = sampling::random_vector(rng, n);
            let scale = 1.0 + rc.max_abs();
            let a = rc.apply(&x, &y, &dt).amax();
            let b = rc.apply(&x, &dt, &y).amax();
            let c = rc.apply(&x, &dt, &dt).amax();
            a.max(b).max(c) / scale
        }
        Curv1 => {
            let rc = riemann(model, q)?;
            let rb = riemann(&cyl.base, p)?;
            let (x, y, v) = (sampling::random_vector(rng, nb), sampling::random_vector(rng, nb), sampling::random_vector(rng, nb));
            let ht = cyl.h_t(t, p);
            let hti = cfg.hti()?;
            let g = cyl.base.metric(p);
            let htv = &ht * &v;
            let ip = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * &g * b)[(0, 0)];
            let rhs = &hti * rb.apply(&x, &y, &htv) - &hti * &y * (4.0 * ip(&x, &htv)) + &hti * &x * (4.0 * ip(&y, &htv));
            rel_residual(&rc.apply(&cfg.lift(&x), &cfg.lift(&y), &cfg.lift(&v)), &cfg.lift(&rhs))
        }
        Curv2 => {
            let rc = riemann(model, q)?;
            let wp = cfg.wp();
            let rf = riemann(&wp.fiber, cfg.x())?;
            let m = nb - 1;
            let (x, y, v) = (sampling::random_vector(rng, m), sampling::random_vector(rng, m), sampling::random_vector(rng, m));
            let hti = cfg.hti()?;
            let lhs = rc.apply(&cfg.lift_fiber(&x), &cfg.lift_fiber(&y), &cfg.lift(&(&hti * wp.lift(&v))));
            let rhs = cfg.lift(&(&hti * wp.lift(&rf.apply(&x, &y, &v))));
            rel_residual(&lhs, &rhs)
        }
        Curv3 => {
            let rc = riemann(model, q)?;
            let wp = cfg.wp();
            let m = nb - 1;
            let (x, y) = (sampling::random_vector(rng, m), sampling::random_vector(rng, m));
            let hti = cfg.hti()?;
            let (xl, yl) = (cfg.lift_fiber(&x), cfg.lift_fiber(&y));
            let es = cfg.lift(&cfg.base_es());
            let a_es = cfg.lift(&(&hti * cfg.base_es()));
            let a_x = cfg.lift(&(&hti * wp.lift(&x)));
            let scale = 1.0 + rc.max_abs();
            let r1 = rc.apply(&xl, &yl, &a_es).amax();
            let r2 = rc.apply(&es, &yl, &a_es).amax();
            let r3 = rc.apply(&es, &yl, &a_x).amax();
            r1.max(r2).max(r3) / scale
        }
        InverseDerivative => {
            let d = central_difference(|s| cyl.h_t_inv(s[0], p).expect("H_t invertible"), &[t], 0, 1e-4);
            let hti = cfg.hti()?;
            rel_mat(&d, &(&hti * &hti * 2.0))
        }
        Decomposition => {
            let wp = cfg.wp();
            let m = nb - 1;
            let g = model.metric(q);
            let hti = cfg.hti()?;
            let mut cols = vec![p_field(cyl, q)?];
            for a in 0..m {
                let mut v = DVector::zeros(m);
                v[a] = 1.0;
                cols.push(cfg.lift(&(&hti * wp.lift(&v))));
            }
            cols.push(q_field(cyl, q)?);
            let b = DMatrix::from_columns(&cols);
            let gram = b.transpose() * g * &b;
            let f = wp.f(p[0]);
            let mut expect = DMatrix::zeros(m + 2, m + 2);
            expect[(0, m + 1)] = 1.0;
            expect[(m + 1, 0)] = 1.0;
            expect.view_mut((1, 1), (m, m)).copy_from(&(wp.fiber.metric(cfg.x()) * (f * f)));
            rel_mat(&gram, &expect)
        }
    };
    Ok(r)
}

/// Checks one identity at `count` seeded configurations in the cylinder
/// chart (shrunk by 15% on every side).
pub fn check_identity(cyl: &CylinderModel, id: CylinderIdentity, count: usize, seed: u64) -> Result<IdentityCheck> {
    if id.needs_warped() {
        cyl.warped_base()?;
    }
    let model = cyl.model();
    let chart = cyl.chart();
    let residuals: Vec<Result<f64>> = (0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = sampling::rng(seed.wrapping_mul(1_000_003).wrapping_add(k as u64));
            let q = sampling::random_point(&mut rng, &chart, 0.15);
            let cfg = Config { cyl, model: &model, q };
            identity_residual(&cfg, id, &mut rng)
        })
        .collect();
    let mut worst = 0.0_f64;
    for r in residuals {
        let r = r?;
        worst = if r.is_nan() { f64::NAN } else { worst.max(r) };
    }
    Ok(IdentityCheck { identity: id, configurations: count, max_residual: worst, tol: id.tol() })
}

/// All identities applicable to the cylinder's base.
pub fn verify_identities(cyl: &CylinderModel, count: usize, seed: u64) -> Result<Vec<IdentityCheck>> {
    let warped = cyl.warped_base().is_ok();
    CylinderIdentity::ALL
        .iter()
        .filter(|id| warped || !id.needs_warped())
        .map(|&id| check_identity(cyl, id, count, seed))
        .collect()
}

/// Largest |R^l_kij| of g_C over `count` seeded points.
pub fn max_curvature(cyl: &CylinderModel, count: usize, seed: u64) -> Result<f64> {
    let model = cyl.model();
    let mut rng = sampling::rng(seed);
    let pts = sampling::random_points(&mut rng, &cyl.chart(), 0.15, count);
    let vals: Vec<Result<f64>> = pts.par_iter().map(|q| Ok(riemann(&model, q)?.max_abs())).collect();
    let mut worst = 0.0_f64;
    for v in vals {
        worst = worst.max(v?);
    }
    Ok(worst)
}
