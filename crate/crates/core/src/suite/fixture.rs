//! Named fixtures the suites run against.

use super::config::{Suite, SuiteConfig};
use crate::cylinder::CylinderModel;
use crate::error::{Error, Result};
use crate::geometry::ManifoldModel;
use crate::warped::{EndomorphismField, ScalarField, WarpedProductModel};
use crate::zoo::{
    cone_codazzi, cylinder_eh, cylinder_product, cylinder_torus, cylinder_torus_identity, flat, flat_hessian_codazzi, flat_torus,
    product_model, round_sphere, torus_codazzi, warped_eh, warped_torus, ConeModel, EguchiHansonModel,
};
use nalgebra::DMatrix;
use std::sync::Arc;

#[derive(Debug)]
pub struct FixtureSpec {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: &'static [&'static str],
    pub suites: &'static [Suite],
}

use Suite::*;

pub static FIXTURES: &[FixtureSpec] = &[
    FixtureSpec { name: "flat", summary: "Euclidean space on [-1, 1]^dim (dim = 3)", params: &["dim"], suites: &[Connection, Curvature, Holonomy] },
    FixtureSpec { name: "flat-torus", summary: "flat torus R^dim / 2 pi Z^dim (dim = 3)", params: &["dim"], suites: &[Connection, Curvature, Holonomy] },
    FixtureSpec {
        name: "hessian",
        summary: "flat R^dim with the Codazzi tensor Hess(sum x_i^2 x_{i+1} + 0.1 x_0^4) (dim = 3)",
        params: &["dim"],
        suites: &[Connection, Curvature, Codazzi, Holonomy],
    },
    FixtureSpec {
        name: "cone",
        summary: "cone dr^2 + r^2 g_{S^2} over the unit sphere, r in [0.5, 2], with T = nabla d_r",
        params: &[],
        suites: &[Connection, Curvature, Codazzi, Holonomy],
    },
    FixtureSpec {
        name: "eguchi-hanson",
        summary: "Eguchi-Hanson metric (a = 1) on r in [1.2a, 4a]; gamma_offset corrupts the closed-form connection table",
        params: &["a", "gamma_offset"],
        suites: &[Connection, Curvature, Holonomy, EhObstruction],
    },
    FixtureSpec {
        name: "product",
        summary: "S^1 x Eguchi-Hanson (a = 1) with T = 2 Id_{S^1} + 3 Id_{EH}",
        params: &["a"],
        suites: &[Connection, Curvature, Codazzi, Holonomy],
    },
    FixtureSpec {
        name: "warped",
        summary: "R x_{e^{-2s}} T^dim, s in [-0.5, 0.5], with H(1 + 0.3 sin s, 0, E) over a non-constant Codazzi T (dim = 3)",
        params: &["dim"],
        suites: &[Connection, Curvature, Codazzi, Holonomy, Spinor],
    },
    FixtureSpec {
        name: "warped-eh",
        summary: "R x_{e^{-2s}} Eguchi-Hanson (a = 1), s in [-0.5, 0.5], with H(1 + 0.3 sin s, 0, E) over T = 2 Id",
        params: &["a"],
        suites: &[Connection, Curvature, Codazzi, Holonomy, Spinor, EhObstruction],
    },
    FixtureSpec {
        name: "cylinder-torus-id",
        summary: "cylinder C[T^3; Id] over R x_{e^{-2s}} T^3",
        params: &[],
        suites: &[Connection, Curvature, Codazzi, Cylinder, Holonomy, Spinor, Causality],
    },
    FixtureSpec {
        name: "cylinder-torus",
        summary: "cylinder C[T^3; H(1, 0, E)] with a non-constant Codazzi T on the flat 3-torus",
        params: &[],
        suites: &[Connection, Curvature, Codazzi, Cylinder, Holonomy, Spinor, Causality],
    },
    FixtureSpec {
        name: "cylinder-eh",
        summary: "cylinder C[EH; H(1, 0, E)] with T = 2 Id on Eguchi-Hanson (a = 1)",
        params: &[],
        suites: &[Connection, Curvature, Codazzi, Cylinder, Holonomy, Spinor, Causality],
    },
    FixtureSpec {
        name: "cylinder-product",
        summary: "cylinder over R x_{e^{-2s}} (S^1 x EH) with T = 2 Id_{S^1} + 3 Id_{EH}",
        params: &[],
        suites: &[Connection, Curvature, Codazzi, Cylinder, Holonomy, Causality],
    },
];

pub fn fixture_spec(name: &str) -> Result<&'static FixtureSpec> {
    FIXTURES.iter().find(|f| f.name == name).ok_or_else(|| Error::FixtureError(format!("unknown fixture '{name}'")))
}

/// What a suite needs to know about the fixture.
#[derive(Clone)]
pub struct Fixture {
    pub name: String,
    pub model: ManifoldModel,
    pub basepoint: Vec<f64>,
    /// Codazzi tensor and the metric it is Codazzi for.
    pub codazzi: Option<(ManifoldModel, EndomorphismField)>,
    /// Warped product with the fiber tensor T of the H(b, 0, E) construction.
    pub warped: Option<(WarpedProductModel, EndomorphismField)>,
    /// Fiber point used as spinor root.
    pub fiber_point: Vec<f64>,
    pub eh: Option<EguchiHansonModel>,
    /// `model` is `eh` itself, so its closed-form connection table applies.
    pub eh_is_model: bool,
    pub cylinder: Option<CylinderModel>,
    pub expected_holonomy: Option<usize>,
    pub flat: bool,
    pub ricci_flat: bool,
    /// ds^2 + e^{-4s} g_F with F flat.
    pub hyperbolic: bool,
    /// Factor dimensions of the cylinder fiber for the block classification.
    pub factor_dims: Vec<usize>,
    pub expect_decomposable: bool,
}

impl Fixture {
    fn plain(name: &str, model: ManifoldModel, basepoint: Vec<f64>) -> Self {
        Fixture {
            name: name.to_string(),
            model,
            basepoint,
            codazzi: None,
            warped: None,
            fiber_point: Vec::new(),
            eh: None,
            eh_is_model: false,
            cylinder: None,
            expected_holonomy: None,
            flat: false,
            ricci_flat: false,
            hyperbolic: false,
            factor_dims: Vec::new(),
            expect_decomposable: false,
        }
    }
}

fn int_param(cfg: &SuiteConfig, key: &str, default: usize, lo: usize, hi: usize) -> Result<usize> {
    let v = cfg.param(key, default as f64);
    if v.fract() != 0.0 || v < lo as f64 || v > hi as f64 {
        return Err(Error::FixtureError(format!("fixture.{key} must be an integer in [{lo}, {hi}], got {v}")));
    }
    Ok(v as usize)
}

fn eh_param(cfg: &SuiteConfig) -> Result<EguchiHansonModel> {
    let a = cfg.param("a", 1.0);
    if !(a > 0.0) {
        return Err(Error::FixtureError(format!("fixture.a must be positive, got {a}")));
    }
    Ok(EguchiHansonModel::new(a).with_gamma_offset(cfg.param("gamma_offset", 0.0)))
}

fn eh_point(eh: &EguchiHansonModel) -> Vec<f64> {
    vec![1.5 * eh.a, 1.5, 3.0, 3.0]
}

fn torus_point(n: usize) -> Vec<f64> {
    (0..n).map(|i| 1.0 + i as f64).collect()
}

fn hessian_potential(k: usize) -> ScalarField {
    Arc::new(move |p: &[f64]| {
        let mut h = 0.1 * p[0].powi(4);
        for i in 0..k - 1 {
            h += p[i] * p[i] * p[i + 1];
        }
        h
    })
}

fn with_root(x: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0];
    v.extend_from_slice(x);
    v
}

fn cylinder_fixture(c: CylinderModel, x0: Vec<f64>, flat: bool, hol: Option<usize>, factor_dims: Vec<usize>) -> Fixture {
    let mut bp = vec![0.0, 0.0];
    bp.extend_from_slice(&x0);
    let mut f = Fixture::plain(&c.name.clone(), c.model(), bp);
    f.codazzi = Some((c.base.clone(), c.h.clone()));
    f.warped = c.warped.clone().map(|wp| (wp, EndomorphismField::identity(x0.len())));
    f.fiber_point = x0;
    f.flat = flat;
    f.expected_holonomy = hol;
    f.factor_dims = factor_dims;
    f.cylinder = Some(c);
    f
}

pub fn build_fixture(cfg: &SuiteConfig) -> Result<Fixture> {
    cfg.validate()?;
    let wrap = |e: Error| match e {
        Error::FixtureError(_) => e,
        other => Error::FixtureError(format!("building '{}': {other}", cfg.fixture)),
    };
    let fx = match cfg.fixture.as_str() {
        "flat" | "flat-torus" => {
            let n = int_param(cfg, "dim", 3, 1, 6)?;
            let (m, bp) = if cfg.fixture == "flat" { (flat(n, 1.0), vec![0.0; n]) } else { (flat_torus(n), torus_point(n)) };
            let mut f = Fixture::plain(&cfg.fixture, m, bp);
            f.flat = true;
            f.ricci_flat = true;
            f.expected_holonomy = Some(0);
            f
        }
        "hessian" => {
            let n = int_param(cfg, "dim", 3, 2, 6)?;
            let m = flat(n, 1.0);
            let mut f = Fixture::plain("hessian", m.clone(), vec![0.1; n]);
            f.codazzi = Some((m, flat_hessian_codazzi(n, hessian_potential(n), 1e-2)));
            f.flat = true;
            f.ricci_flat = true;
            f.expected_holonomy = Some(0);
            f
        }
        "cone" => {
            let cone = ConeModel::new(round_sphere(0.3), (0.5, 2.0));
            let mut f = Fixture::plain("cone", cone.model(), vec![1.0, 1.2, 2.0]);
            f.codazzi = Some((cone.model(), cone_codazzi(&cone)));
            f.flat = true;
            f.ricci_flat = true;
            f.expected_holonomy = Some(0);
            f
        }
        "eguchi-hanson" => {
            let eh = eh_param(cfg)?;
            let mut f = Fixture::plain("eguchi-hanson", eh.model(), eh_point(&eh));
            f.ricci_flat = true;
            f.expected_holonomy = Some(3);
            f.eh = Some(eh);
            f.eh_is_model = true;
            f
        }
        "product" => {
            let eh = eh_param(cfg)?;
            let (m, t) = product_model(&[flat_torus(1), eh.model()], &[2.0, 3.0]).map_err(wrap)?;
            let mut bp = vec![1.0];
            bp.extend(eh_point(&eh));
            let mut f = Fixture::plain("product", m.clone(), bp);
            f.codazzi = Some((m, t));
            f.ricci_flat = true;
            f.expected_holonomy = Some(3);
            f
        }
        "warped" => {
            let n = int_param(cfg, "dim", 3, 2, 5)?;
            let wp = warped_torus(n, (-0.5, 0.5));
            let x0 = torus_point(n);
            let mut f = Fixture::plain("warped", wp.model(), with_root(&x0));
            f.warped = Some((wp, torus_codazzi(n)));
            f.fiber_point = x0;
            f.hyperbolic = true;
            f.expected_holonomy = Some(n * (n + 1) / 2);
            f
        }
        "warped-eh" => {
            let eh = eh_param(cfg)?;
            let wp = warped_eh(&eh, (-0.5, 0.5));
            let x0 = eh_point(&eh);
            let mut f = Fixture::plain("warped-eh", wp.model(), with_root(&x0));
            f.warped = Some((wp, EndomorphismField::constant("2Id", DMatrix::identity(4, 4) * 2.0)));
            f.fiber_point = x0;
            f.eh = Some(eh);
            f
        }
        "cylinder-torus-id" => cylinder_fixture(cylinder_torus_identity().map_err(wrap)?, torus_point(3), true, Some(0), vec![3]),
        "cylinder-torus" => cylinder_fixture(cylinder_torus().map_err(wrap)?, torus_point(3), true, Some(0), vec![3]),
        "cylinder-eh" => {
            let eh = EguchiHansonModel::new(1.0);
            cylinder_fixture(cylinder_eh().map_err(wrap)?, eh_point(&eh), false, Some(7), vec![4])
        }
        "cylinder-product" => {
            let eh = EguchiHansonModel::new(1.0);
            let mut x0 = vec![1.0];
            x0.extend(eh_point(&eh));
            let mut f = cylinder_fixture(cylinder_product().map_err(wrap)?, x0, false, None, vec![1, 4]);
            f.expect_decomposable = true;
            f
        }
        other => return Err(Error::FixtureError(format!("unknown fixture '{other}'"))),
    };
    Ok(fx)
}
