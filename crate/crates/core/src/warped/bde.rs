//! Codazzi tensors on ℝ ×_f F assembled from a scalar b, a vector family
//! D(∂_s) and an endomorphism family E on the fiber.

use super::codazzi::{covariant_endo, max_codazzi_residual, orthonormal_basis, CovariantEndo};
use super::endo::{endo_norm, spectral_bounds, vec_norm, EndomorphismField, SpectralBounds};
use super::product::WarpedProductModel;
use super::spline::HermiteSpline;
use crate::error::{Error, Result};
use crate::geometry::{central_difference, central_difference_scalar, central_difference_vec, christoffel, riemann, MatrixField};
use crate::sampling;
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

pub type ScalarField = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type FiberVectorField = Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// H = H(b, D, E): H∂_s = b∂_s + D, HV = f² g_F(V, D)∂_s + EV.
/// All three callbacks take the full point (s, x); `d` and `e` are fiber valued.
#[derive(Clone)]
pub struct BdeSplit {
    pub b: ScalarField,
    pub d: FiberVectorField,
    pub e: MatrixField,
}

impl BdeSplit {
    /// H(b(s), 0, E).
    pub fn without_d(b: ScalarFn, e: MatrixField, fiber_dim: usize) -> Self {
        BdeSplit {
            b: Arc::new(move |p: &[f64]| b(p[0])),
            d: Arc::new(move |_p: &[f64]| DVector::zeros(fiber_dim)),
            e,
        }
    }

    /// Block matrix of H in the chart (s, x).
    pub fn matrix(&self, wp: &WarpedProductModel, p: &[f64]) -> DMatrix<f64> {
        let n = wp.dim();
        let m = n - 1;
        let f = wp.f(p[0]);
        let gf = wp.fiber.metric(&p[1..]);
        let d = (self.d)(p);
        let e = (self.e)(p);
        let mut h = DMatrix::zeros(n, n);
        h[(0, 0)] = (self.b)(p);
        h.view_mut((1, 0), (m, 1)).copy_from(&d);
        let row = (gf * &d).transpose() * (f * f);
        h.view_mut((0, 1), (1, m)).copy_from(&row);
        h.view_mut((1, 1), (m, m)).copy_from(&e);
        h
    }

    pub fn assemble(&self, wp: &WarpedProductModel) -> EndomorphismField {
        let s = self.clone();
        let w = wp.clone();
        EndomorphismField::new("H(b,D,E)", Arc::new(move |p: &[f64]| s.matrix(&w, p)))
    }
}

/// Residuals of the four block conditions plus the cross-check against the
/// assembled tensor.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BdeReport {
    /// ∇^F D − Ė − (ḟ/f)E + b(ḟ/f)Id.
    pub c5: f64,
    /// grad^F b − 3fḟD − f²Ḋ (gradient for g_F).
    pub c6: f64,
    /// d^{∇^F}E(V,W) − fḟ(g_F(V,D)W − g_F(W,D)V).
    pub c7: f64,
    /// R^F(V,W)D − (ff̈ − ḟ²)(g_F(V,D)W − g_F(W,D)V).
    pub c8: f64,
    /// Largest Codazzi residual of the assembled H.
    pub assembled: f64,
    /// Largest mismatch between d^∇H(X,Y) and its reconstruction from the blocks.
    pub reconstruction: f64,
    pub samples: usize,
}

impl BdeReport {
    pub fn max_block(&self) -> f64 {
        self.c5.max(self.c6).max(self.c7).max(self.c8)
    }
}

/// Block residuals at one point.
struct BlockResiduals {
    r5: DMatrix<f64>,
    r6: DVector<f64>,
    /// r7[a*m + b] = residual vector of C7 on (∂_a, ∂_b).
    r7: Vec<DVector<f64>>,
    gf: DMatrix<f64>,
    f: f64,
}

impl BlockResiduals {
    fn c7(&self, v: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let m = v.len();
        let mut out = DVector::zeros(m);
        for a in 0..m {
            for b in 0..m {
                let c = v[a] * w[b];
                if c != 0.0 {
                    out += &self.r7[a * m + b] * c;
                }
            }
        }
        out
    }

    /// d^∇H(X, Y) rebuilt from the blocks, X = (α, V), Y = (β, W).
    fn reconstruct(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let m = x.len() - 1;
        let (alpha, v) = (x[0], x.rows(1, m).into_owned());
        let (beta, w) = (y[0], y.rows(1, m).into_owned());
        let d_s = |u: &DVector<f64>| -> (f64, DVector<f64>) {
            (-(u.transpose() * &self.gf * &self.r6)[(0, 0)], -(&self.r5 * u))
        };
        let (sw, fw) = d_s(&w);
        let (sv, fv) = d_s(&v);
        let vw_s = self.f * self.f
            * ((w.transpose() * &self.gf * (&self.r5 * &v))[(0, 0)] - (v.transpose() * &self.gf * (&self.r5 * &w))[(0, 0)]);
        let vw_f = self.c7(&v, &w);
        let mut out = DVector::zeros(m + 1);
        out[0] = alpha * sw - beta * sv + vw_s;
        out.rows_mut(1, m).copy_from(&(fw * alpha - fv * beta + vw_f));
        out
    }
}

fn block_residuals(wp: &WarpedProductModel, split: &BdeSplit, p: &[f64], with_c8: bool) -> Result<(BlockResiduals, f64)> {
    let fiber = &wp.fiber;
    let m = fiber.dim;
    let s = p[0];
    let x = &p[1..];
    let f = wp.f(s);
    let df = wp.df(s);
    let ddf = wp.ddf(s);
    let hf = df / f;
    let gf = fiber.metric(x);
    let gam = christoffel(fiber, x)?;
    let b = (split.b)(p);
    let d = (split.d)(p);
    let e = (split.e)(p);
    let hs = 1e-4;
    let e_dot = central_difference(|q| (split.e)(q), p, 0, hs);
    let d_dot = central_difference_vec(|q| (split.d)(q), p, 0, hs);
    // Fiber derivatives along x-coordinates (axis a of the fiber is axis a+1 of p).
    let mut nab_d = DMatrix::zeros(m, m);
    let mut grad_b = DVector::zeros(m);
    let mut nab_e = Vec::with_capacity(m);
    for a in 0..m {
        let h = fiber.fd.h(a);
        let dd = central_difference_vec(|q| (split.d)(q), p, a + 1, h);
        let col = dd + gam.axis(a) * &d;
        nab_d.set_column(a, &col);
        grad_b[a] = central_difference_scalar(|q| (split.b)(q), p, a + 1, h);
        let de = central_difference(|q| (split.e)(q), p, a + 1, h);
        let ga = gam.axis(a);
        nab_e.push(de + &ga * &e - &e * &ga);
    }
    let ginv = gf.clone().try_inverse().expect("fiber metric invertible");
    let id = DMatrix::<f64>::identity(m, m);
    let r5 = &nab_d - &e_dot - &e * hf + &id * (b * hf);
    let r6 = &ginv * grad_b - &d * (3.0 * f * df) - &d_dot * (f * f);
    let gd = &gf * &d;
    let mut r7 = Vec::with_capacity(m * m);
    for a in 0..m {
        for bb in 0..m {
            let mut v = nab_e[a].column(bb) - nab_e[bb].column(a);
            // − fḟ(g_F(∂a,D)∂b − g_F(∂b,D)∂a)
            v[bb] -= f * df * gd[a];
            v[a] += f * df * gd[bb];
            r7.push(v);
        }
    }
    let mut c8 = 0.0_f64;
    if with_c8 {
        let rf = riemann(fiber, x)?;
        let basis = orthonormal_basis(&gf);
        for i in 0..m {
            for j in i + 1..m {
                let v = basis.column(i).into_owned();
                let w = basis.column(j).into_owned();
                let lhs = rf.apply(&v, &w, &d);
                let rhs = (&w * gd.dot(&v) - &v * gd.dot(&w)) * (f * ddf - df * df);
                c8 = c8.max(vec_norm(&gf, &(lhs - rhs)));
            }
        }
    }
    Ok((BlockResiduals { r5, r6, r7, gf, f }, c8))
}

/// Evaluates the four block conditions at `points` and cross-checks them
/// against the Codazzi residual of the assembled tensor.
pub fn check_bde_conditions(wp: &WarpedProductModel, split: &BdeSplit, points: &[Vec<f64>], seed: u64) -> Result<BdeReport> {
    let model = wp.model();
    let h = split.assemble(wp);
    let mut rng = sampling::rng(seed);
    let mut rep = BdeReport::default();
    for p in points {
        let (blocks, c8) = block_residuals(wp, split, p, true)?;
        rep.c5 = rep.c5.max(endo_norm(&blocks.gf, &blocks.r5));
        rep.c6 = rep.c6.max(vec_norm(&blocks.gf, &blocks.r6));
        let basis = orthonormal_basis(&blocks.gf);
        let m = basis.ncols();
        for i in 0..m {
            for j in i + 1..m {
                let v = blocks.c7(&basis.column(i).into_owned(), &basis.column(j).into_owned());
                rep.c7 = rep.c7.max(vec_norm(&blocks.gf, &v));
            }
        }
        rep.c8 = rep.c8.max(c8);
        let cov: CovariantEndo = covariant_endo(&model, &h, p)?;
        rep.assembled = rep.assembled.max(cov.max_residual());
        let g = model.metric(p);
        for _ in 0..3 {
            let x = sampling::random_unit_vector(&mut rng, &g);
            let y = sampling::random_unit_vector(&mut rng, &g);
            let direct = cov.exterior(&x, &y);
            let rebuilt = blocks.reconstruct(&x, &y);
            rep.reconstruction = rep.reconstruction.max(vec_norm(&g, &(direct - rebuilt)));
        }
        rep.samples += 1;
    }
    Ok(rep)
}

/// E(s) = (1/f)(T + ∫₀ˢ b ḟ dσ · Id).
#[derive(Clone)]
pub struct EFamily {
    pub t: EndomorphismField,
    pub b: ScalarFn,
    pub integral: Arc<HermiteSpline>,
    pub wp: WarpedProductModel,
}

impl EFamily {
    pub fn e(&self, s: f64, x: &[f64]) -> DMatrix<f64> {
        let t = self.t.at(x);
        let m = t.nrows();
        (t + DMatrix::<f64>::identity(m, m) * self.integral.eval(s)) / self.wp.f(s)
    }

    /// Ė = (bḟ Id − ḟE)/f, from (fE)˙ = bḟ Id.
    pub fn e_dot(&self, s: f64, x: &[f64]) -> DMatrix<f64> {
        let e = self.e(s, x);
        let m = e.nrows();
        let df = self.wp.df(s);
        (DMatrix::<f64>::identity(m, m) * ((self.b)(s) * df) - e * df) / self.wp.f(s)
    }

    pub fn field(&self) -> MatrixField {
        let me = self.clone();
        Arc::new(move |p: &[f64]| me.e(p[0], &p[1..]))
    }

    pub fn split(&self) -> BdeSplit {
        BdeSplit::without_d(self.b.clone(), self.field(), self.wp.fiber.dim)
    }

    /// Residual of (fE)˙ − bḟ Id at (s, x) by finite differences.
    pub fn ode_residual(&self, s: f64, x: &[f64]) -> f64 {
        let fe = |q: &[f64]| self.e(q[0], x) * self.wp.f(q[0]);
        let d = central_difference(fe, &[s], 0, 1e-4);
        let m = d.nrows();
        (d - DMatrix::<f64>::identity(m, m) * ((self.b)(s) * self.wp.df(s))).amax()
    }
}

/// Builds the E family after checking that T is Codazzi on the fiber.
pub fn build_e_family(t: &EndomorphismField, b: ScalarFn, wp: &WarpedProductModel, check_points: &[Vec<f64>], tol: f64) -> Result<EFamily> {
    let res = max_codazzi_residual(&wp.fiber, t, check_points)?;
    if res > tol {
        return Err(Error::NonCodazziT { residual: res });
    }
    let (lo, hi) = wp.s_range;
    let origin = 0.0_f64.clamp(lo, hi);
    let (b2, w2) = (b.clone(), wp.clone());
    let spline = HermiteSpline::antiderivative(move |s| b2(s) * w2.df(s), lo, hi, origin, 2e-3, 1e-10);
    Ok(EFamily { t: t.clone(), b, integral: Arc::new(spline), wp: wp.clone() })
}

/// Strictly increasing profile h with h < k/2, used by the bounded construction.
#[derive(Clone)]
pub struct HProfile {
    pub h: ScalarFn,
    pub dh: ScalarFn,
}

impl HProfile {
    /// h(s) = (k/2 − ε) − (w/π)(π/2 − arctan s), w = |k| (1 if k = 0), ε = 1e-6·w.
    /// For k > 0 this is (k/π)·arctan(s) − 1e-6·k.
    pub fn default_for(k: f64) -> HProfile {
        let w = if k == 0.0 { 1.0 } else { k.abs() };
        let eps = 1e-6 * w;
        HProfile {
            h: Arc::new(move |s: f64| (k / 2.0 - eps) - (w / std::f64::consts::PI) * (std::f64::consts::FRAC_PI_2 - s.atan())),
            dh: Arc::new(move |s: f64| (w / std::f64::consts::PI) / (1.0 + s * s)),
        }
    }
}

/// Output of the bounded construction.
#[derive(Clone)]
pub struct BoundedCodazzi {
    /// H(b, 0, E) + c·Id on the warped product.
    pub h: EndomorphismField,
    pub split: BdeSplit,
    pub family: EFamily,
    pub bounds: SpectralBounds,
}

/// H(b,0,E) + c·Id with b = e^{2s}ḣ and E = e^{2s}(T − 2h(s)), whose
/// eigenvalues are ≥ c whenever T > k and h < k/2.
pub fn build_bounded_codazzi(
    wp: &WarpedProductModel,
    t: &EndomorphismField,
    k: f64,
    c: f64,
    profile: Option<HProfile>,
    check_points: &[Vec<f64>],
    tol: f64,
    seed: u64,
) -> Result<BoundedCodazzi> {
    if !wp.warping.is_standard() {
        return Err(Error::WrongBase);
    }
    let fiber_scan = {
        let mut pts = sampling::lattice(&wp.fiber.chart, 0.02, 17, 2048);
        let mut rng = sampling::rng(seed);
        pts.extend(sampling::random_points(&mut rng, &wp.fiber.chart, 0.02, 100));
        pts
    };
    for x in &fiber_scan {
        for ev in t.eigenvalues(&wp.fiber, x) {
            if ev <= k {
                return Err(Error::BoundViolated { eigenvalue: ev, bound: k });
            }
        }
    }
    let prof = profile.unwrap_or_else(|| HProfile::default_for(k));
    let h0 = (prof.h)(0.0);
    // Shift the integration base so that E = e^{2s}(T − 2h(s)).
    let t_shift = t.shifted(-2.0 * h0);
    let dh = prof.dh.clone();
    let b: ScalarFn = Arc::new(move |s: f64| (2.0 * s).exp() * dh(s));
    let family = build_e_family(&t_shift, b, wp, check_points, tol)?;
    let split = family.split();
    let h = split.assemble(wp).shifted(c);
    let model = wp.model();
    let bounds = spectral_bounds(&model, &h, 5, 100, seed);
    Ok(BoundedCodazzi { h, split, family, bounds })
}

/// Ẽ = (ff̈ − ḟ²)E − fḟ ∇^F D(∂_s) on the fiber at the slice `s`.
pub fn tilde_e(wp: &WarpedProductModel, split: &BdeSplit, s: f64) -> EndomorphismField {
    let w = wp.clone();
    let sp = split.clone();
    EndomorphismField::new(
        "E~",
        Arc::new(move |x: &[f64]| {
            let fiber = &w.fiber;
            let m = fiber.dim;
            let mut p = vec![s];
            p.extend_from_slice(x);
            let f = w.f(s);
            let df = w.df(s);
            let ddf = w.ddf(s);
            let e = (sp.e)(&p);
            let d = (sp.d)(&p);
            let gam = crate::geometry::christoffel_unchecked(fiber, x).expect("fiber metric invertible");
            let mut nab_d = DMatrix::zeros(m, m);
            for a in 0..m {
                let dd = central_difference_vec(|q| (sp.d)(q), &p, a + 1, fiber.fd.h(a));
                nab_d.set_column(a, &(dd + gam.axis(a) * &d));
            }
            e * (f * ddf - df * df) - nab_d * (f * df)
        }),
    )
}

/// Flat-fiber example with D ≠ 0 for f = e^{-2s}: D = α(s)x, E = φ Id with
/// φ = fḟα|x|²/2 + c(s) and b = φ − φ̇/2 + α/2. Satisfies all four block
/// conditions; `alpha`, `c` come with their derivatives.
pub fn radial_d_split(alpha: (ScalarFn, ScalarFn), c: (ScalarFn, ScalarFn), fiber_dim: usize) -> BdeSplit {
    let (al, dal) = alpha;
    let (cc, dcc) = c;
    let phi = {
        let (al, cc) = (al.clone(), cc.clone());
        move |p: &[f64]| {
            let s = p[0];
            let x2: f64 = p[1..].iter().map(|v| v * v).sum();
            let ffd = -2.0 * (-4.0 * s).exp();
            ffd * al(s) * x2 / 2.0 + cc(s)
        }
    };
    let phi_dot = {
        let (al, dal, dcc) = (al.clone(), dal.clone(), dcc.clone());
        move |p: &[f64]| {
            let s = p[0];
            let x2: f64 = p[1..].iter().map(|v| v * v).sum();
            // d/ds(−e^{-4s} α |x|²) = (4α − α̇) e^{-4s} |x|²
            (4.0 * al(s) - dal(s)) * (-4.0 * s).exp() * x2 + dcc(s)
        }
    };
    let phi2 = phi.clone();
    let al2 = al.clone();
    BdeSplit {
        b: Arc::new(move |p: &[f64]| phi(p) - 0.5 * phi_dot(p) + 0.5 * al2(p[0])),
        d: Arc::new(move |p: &[f64]| DVector::from_column_slice(&p[1..]) * al(p[0])),
        e: Arc::new(move |p: &[f64]| DMatrix::<f64>::identity(fiber_dim, fiber_dim) * phi2(p)),
    }
}

/// H(β, 0, E) with constant β, for which the E family has the closed form
/// E = (T − β)/f + β. For f = e^{-2s} this is H = β Id + e^{2s}(T − β) on
/// the fiber block.
pub fn constant_b_split(wp: &WarpedProductModel, t: &EndomorphismField, beta: f64) -> BdeSplit {
    let w = wp.clone();
    let tt = t.clone();
    let e: MatrixField = Arc::new(move |p: &[f64]| {
        let tm = tt.at(&p[1..]);
        let m = tm.nrows();
        let id = DMatrix::<f64>::identity(m, m);
        (tm - &id * beta) / w.f(p[0]) + id * beta
    });
    BdeSplit::without_d(Arc::new(move |_s: f64| beta), e, wp.fiber.dim)
}
