use super::*;
use crate::geometry::{constant_metric, ChartBox, ManifoldModel, Signature};
use crate::sampling;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use std::sync::Arc;

fn torus(n: usize) -> ManifoldModel {
    ManifoldModel::new(
        "torus",
        ChartBox::new(vec![0.0; n], vec![2.0 * std::f64::consts::PI; n]),
        Signature::riemannian(n),
        constant_metric(DMatrix::identity(n, n)),
    )
}

fn plane(n: usize) -> ManifoldModel {
    ManifoldModel::new(
        "plane",
        ChartBox::new(vec![-2.0; n], vec![2.0; n]),
        Signature::riemannian(n),
        constant_metric(DMatrix::identity(n, n)),
    )
}

/// Hessian of h = sin x₀ + ½ cos x₁ on the flat torus.
fn periodic_hessian(n: usize) -> EndomorphismField {
    EndomorphismField::new(
        "hess",
        Arc::new(move |p: &[f64]| {
            let mut m = DMatrix::zeros(n, n);
            m[(0, 0)] = -p[0].sin();
            m[(1, 1)] = -0.5 * p[1].cos();
            m
        }),
    )
}

fn points(model: &ManifoldModel, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = sampling::rng(seed);
    sampling::random_points(&mut rng, &model.chart, 0.05, count)
}

#[test]
fn identity_multiple_is_codazzi() {
    let wp = WarpedProductModel::standard(torus(2), (-0.5, 0.5));
    let m = wp.model();
    let a = EndomorphismField::identity(3).combine(3.0, &EndomorphismField::identity(3), 0.0);
    assert!(max_codazzi_residual(&m, &a, &points(&m, 5, 1)).unwrap() < 1e-10);
}

#[test]
fn hessian_is_codazzi_on_flat_space() {
    let m = plane(3);
    let a = EndomorphismField::new(
        "hess",
        Arc::new(|p: &[f64]| {
            // h = x₀²x₁ + sin x₂
            DMatrix::from_row_slice(3, 3, &[2.0 * p[1], 2.0 * p[0], 0.0, 2.0 * p[0], 0.0, 0.0, 0.0, 0.0, -p[2].sin()])
        }),
    );
    assert!(max_codazzi_residual(&m, &a, &points(&m, 10, 2)).unwrap() < 1e-9);
    let bad = EndomorphismField::new("bad", Arc::new(|p: &[f64]| DMatrix::from_diagonal(&DVector::from_vec(vec![p[1], 0.0, 0.0]))));
    assert!(max_codazzi_residual(&m, &bad, &points(&m, 3, 2)).unwrap() > 0.1);
}

#[test]
fn asymmetric_field_rejected() {
    let m = plane(2);
    let a = EndomorphismField::constant("skew", DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    let x = DVector::from_vec(vec![1.0, 0.0]);
    let y = DVector::from_vec(vec![0.0, 1.0]);
    assert!(matches!(codazzi_residual(&m, &a, &[0.0, 0.0], &x, &y), Err(crate::Error::AsymmetricField { .. })));
}

#[test]
fn e_family_matches_closed_form_for_unit_b() {
    let wp = WarpedProductModel::standard(torus(2), (-1.0, 1.0));
    let t = periodic_hessian(2);
    let fam = build_e_family(&t, Arc::new(|_s| 1.0), &wp, &points(&wp.fiber, 5, 3), 1e-6).unwrap();
    for &s in &[-0.9f64, -0.3, 0.0, 0.45, 0.95] {
        let x = [1.0, 2.0];
        let tt = t.at(&x);
        let expect = &tt * (2.0 * s).exp() + DMatrix::<f64>::identity(2, 2) * (1.0 - (2.0 * s).exp());
        assert!((fam.e(s, &x) - expect).amax() < 1e-10);
        assert!(fam.ode_residual(s, &x) < 1e-8);
    }
}

#[test]
fn zero_data_gives_zero_family() {
    let wp = WarpedProductModel::standard(torus(2), (-1.0, 1.0));
    let t = EndomorphismField::constant("0", DMatrix::zeros(2, 2));
    let fam = build_e_family(&t, Arc::new(|_s| 0.0), &wp, &points(&wp.fiber, 2, 3), 1e-6).unwrap();
    assert_eq!(fam.e(0.4, &[1.0, 1.0]).amax(), 0.0);
}

#[test]
fn non_codazzi_t_rejected() {
    let wp = WarpedProductModel::standard(torus(2), (-1.0, 1.0));
    let t = EndomorphismField::new("bad", Arc::new(|p: &[f64]| DMatrix::from_diagonal(&DVector::from_vec(vec![p[1].sin(), 0.0]))));
    let r = build_e_family(&t, Arc::new(|_s| 1.0), &wp, &points(&wp.fiber, 4, 3), 1e-6);
    assert!(matches!(r, Err(crate::Error::NonCodazziT { .. })));
}

#[test]
fn e_family_split_satisfies_block_conditions() {
    let wp = WarpedProductModel::standard(torus(3), (-0.8, 0.8));
    let t = periodic_hessian(3);
    let fam = build_e_family(&t, Arc::new(|s: f64| 1.0 + 0.3 * s.sin()), &wp, &points(&wp.fiber, 5, 4), 1e-6).unwrap();
    let m = wp.model();
    let rep = check_bde_conditions(&wp, &fam.split(), &points(&m, 20, 5), 6).unwrap();
    assert!(rep.max_block() < 1e-6, "{rep:?}");
    assert!(rep.assembled < 1e-6, "{rep:?}");
    assert!(rep.reconstruction < 1e-6, "{rep:?}");
}

#[test]
fn fiber_dependent_b_breaks_c6() {
    let wp = WarpedProductModel::standard(torus(2), (-0.8, 0.8));
    let split = BdeSplit {
        b: Arc::new(|p: &[f64]| p[1].sin()),
        d: Arc::new(|_p: &[f64]| DVector::zeros(2)),
        e: Arc::new(|_p: &[f64]| DMatrix::zeros(2, 2)),
    };
    let p = vec![0.1, 0.7, 1.3];
    let rep = check_bde_conditions(&wp, &split, &[p.clone()], 1).unwrap();
    assert!((rep.c6 - p[1].cos().abs()).abs() < 1e-9);
    assert!(rep.reconstruction < 1e-8);
}

#[test]
fn perturbation_grows_linearly() {
    let wp = WarpedProductModel::standard(torus(2), (-0.8, 0.8));
    let fam = build_e_family(&periodic_hessian(2), Arc::new(|_s| 1.0), &wp, &points(&wp.fiber, 3, 4), 1e-6).unwrap();
    let pts = points(&wp.model(), 6, 7);
    let res = |eps: f64| {
        let base = fam.field();
        let mut split = fam.split();
        split.e = Arc::new(move |p: &[f64]| {
            let mut s = DMatrix::zeros(2, 2);
            s[(0, 1)] = (p[1] + p[2]).sin();
            s[(1, 0)] = s[(0, 1)];
            base(p) + s * eps
        });
        check_bde_conditions(&wp, &split, &pts, 1).unwrap()
    };
    let a = res(1e-3);
    let b = res(2e-3);
    assert!((b.c7 / a.c7 - 2.0).abs() < 1e-4);
    assert!((b.assembled / a.assembled - 2.0).abs() < 1e-4);
}

#[test]
fn radial_d_split_satisfies_all_conditions() {
    let wp = WarpedProductModel::standard(plane(2), (-0.5, 0.5));
    let split = radial_d_split(
        (Arc::new(|s: f64| 1.0 + 0.5 * s), Arc::new(|_s: f64| 0.5)),
        (Arc::new(|s: f64| s.cos()), Arc::new(|s: f64| -s.sin())),
        2,
    );
    let m = wp.model();
    let rep = check_bde_conditions(&wp, &split, &points(&m, 15, 8), 9).unwrap();
    assert!(rep.max_block() < 1e-6, "{rep:?}");
    assert!(rep.assembled < 1e-6, "{rep:?}");
    assert!(rep.reconstruction < 1e-6, "{rep:?}");
    // f = e^{-2s}: Ẽ = −fḟ∇D = 2e^{-4s}α Id, Codazzi on the fiber.
    let s = 0.2;
    let te = tilde_e(&wp, &split, s);
    let x = [0.3, -0.4];
    let expect = 2.0 * (-4.0 * s).exp() * (1.0 + 0.5 * s);
    assert!((te.at(&x) - DMatrix::<f64>::identity(2, 2) * expect).amax() < 1e-8);
    assert!(max_codazzi_residual(&wp.fiber, &te, &points(&wp.fiber, 5, 1)).unwrap() < 1e-6);
}

#[test]
fn tilde_e_without_d_is_scaled_e() {
    // f = cosh-type warping where f f̈ − ḟ² ≠ 0.
    let warping = Warping::custom(Arc::new(|s: f64| s.cosh()), Arc::new(|s: f64| s.sinh()), Arc::new(|s: f64| s.cosh()));
    let wp = WarpedProductModel::new(torus(2), warping, (-0.5, 0.5));
    let t = periodic_hessian(2);
    let split = BdeSplit::without_d(Arc::new(|_s| 0.0), {
        let t = t.clone();
        Arc::new(move |p: &[f64]| t.at(&p[1..]))
    }, 2);
    let te = tilde_e(&wp, &split, 0.3);
    let x = [0.5, 0.9];
    assert!((te.at(&x) - t.at(&x)).amax() < 1e-10);
    assert!(max_codazzi_residual(&wp.fiber, &te, &points(&wp.fiber, 4, 2)).unwrap() < 1e-8);
}

#[test]
fn bounded_codazzi_has_eigenvalues_above_shift() {
    let wp = WarpedProductModel::standard(torus(2), (-1.0, 1.0));
    let t = EndomorphismField::constant("4.5 Id", DMatrix::identity(2, 2) * 4.5);
    let prof = HProfile { h: Arc::new(|s: f64| s.atan()), dh: Arc::new(|s: f64| 1.0 / (1.0 + s * s)) };
    let bc = build_bounded_codazzi(&wp, &t, 4.0, 1.0, Some(prof), &points(&wp.fiber, 3, 1), 1e-6, 11).unwrap();
    assert!(bc.bounds.global_inf >= 1.0 - 1e-6, "{:?}", bc.bounds);
    let m = wp.model();
    assert!(max_codazzi_residual(&m, &bc.h, &points(&m, 10, 3)).unwrap() < 1e-6);
    // E = e^{2s}(T − 2h(s))
    let s = 0.37;
    let e = bc.family.e(s, &[1.0, 1.0]);
    assert!((e[(0, 0)] - (2.0 * s).exp() * (4.5 - 2.0 * s.atan())).abs() < 1e-9);
}

#[test]
fn bounded_codazzi_default_profile() {
    let wp = WarpedProductModel::standard(torus(2), (-1.0, 1.0));
    let t = periodic_hessian(2);
    let bc = build_bounded_codazzi(&wp, &t, -1.2, 0.5, None, &points(&wp.fiber, 3, 1), 1e-6, 11).unwrap();
    assert!(bc.bounds.global_inf >= 0.5 - 1e-6);
}

#[test]
fn bound_violation_detected() {
    let wp = WarpedProductModel::standard(torus(2), (-1.0, 1.0));
    let t = EndomorphismField::constant("diag(0,1)", DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 1.0])));
    let r = build_bounded_codazzi(&wp, &t, 0.0, 0.0, None, &points(&wp.fiber, 3, 1), 1e-6, 11);
    assert!(matches!(r, Err(crate::Error::BoundViolated { .. })));
}

#[test]
fn conjugated_connection_on_hessian_metric() {
    let m = plane(2);
    let a = EndomorphismField::constant("diag(2,4)", DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 4.0])));
    let rep = conjugated_connection_check(&m, &a, &points(&m, 5, 1), true).unwrap();
    assert!(rep.connection < 1e-10 && rep.curvature < 1e-8 && rep.inverse_codazzi < 1e-8);
}

#[test]
fn conjugated_connection_on_warped_codazzi() {
    let wp = WarpedProductModel::standard(torus(2), (-0.5, 0.5));
    let t = EndomorphismField::constant("3 Id", DMatrix::identity(2, 2) * 3.0);
    let bc = build_bounded_codazzi(&wp, &t, 2.0, 1.0, None, &points(&wp.fiber, 3, 1), 1e-6, 1).unwrap();
    let m = wp.model();
    let pts = points(&m, 3, 4);
    let rep = conjugated_connection_check(&m, &bc.h, &pts, true).unwrap();
    assert!(rep.connection < 1e-7, "{rep:?}");
    assert!(rep.curvature < 1e-4, "{rep:?}");
    assert!(rep.inverse_codazzi < 1e-6, "{rep:?}");
    for p in &pts {
        assert!(ricci_commutation_residual(&m, &bc.h, p).unwrap() < 1e-4);
    }
}

#[test]
fn singular_a_rejected() {
    let m = plane(2);
    let a = EndomorphismField::constant("diag(1,0)", DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0])));
    assert!(matches!(conjugated_connection_check(&m, &a, &[vec![0.0, 0.0]], false), Err(crate::Error::SingularA { .. })));
}

#[test]
fn spectral_bounds_signs() {
    let m = plane(2);
    let a = EndomorphismField::constant("d", DMatrix::from_diagonal(&DVector::from_vec(vec![-2.0, 3.0])));
    let b = spectral_bounds(&m, &a, 3, 5, 1);
    assert_eq!(b.sup_positive, Some(3.0));
    assert_eq!(b.inf_negative, Some(-2.0));
    assert_eq!(b.inf_positive, Some(3.0));
    assert_eq!(b.sup_negative, Some(-2.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn codazzi_residual_is_subadditive(alpha in -2.0f64..2.0, beta in -2.0f64..2.0, seed in 0u64..500) {
        let m = plane(2);
        let a = EndomorphismField::new("a", Arc::new(|p: &[f64]| DMatrix::from_diagonal(&DVector::from_vec(vec![p[1] * p[1], 0.0]))));
        let b = EndomorphismField::new("b", Arc::new(|p: &[f64]| DMatrix::from_row_slice(2, 2, &[0.0, p[0], p[0], p[1]])));
        let mut rng = sampling::rng(seed);
        let p = sampling::random_point(&mut rng, &m.chart, 0.1);
        let x = sampling::random_vector(&mut rng, 2);
        let y = sampling::random_vector(&mut rng, 2);
        let ra = codazzi_residual(&m, &a, &p, &x, &y).unwrap();
        let rb = codazzi_residual(&m, &b, &p, &x, &y).unwrap();
        let rc = codazzi_residual(&m, &a.combine(alpha, &b, beta), &p, &x, &y).unwrap();
        prop_assert!(rc <= alpha.abs() * ra + beta.abs() * rb + 1e-9);
        prop_assert!(codazzi_residual(&m, &a, &p, &x, &x).unwrap() < 1e-12);
    }
}
