use super::*;
use crate::geometry::{CurvePath, TransportOptions};
use crate::warped::{EndomorphismField, WarpedProductModel};
use crate::zoo::{cylinder_eh, cylinder_torus, cylinder_torus_identity, flat, flat_torus};
use crate::Error;
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

fn diag(v: &[f64]) -> EndomorphismField {
    EndomorphismField::constant("diag", DMatrix::from_diagonal(&DVector::from_column_slice(v)))
}

#[test]
fn interval_from_a_spectrum() {
    let opts = CylinderOptions::default();
    let c = build_cylinder_from_a(&flat(3, 1.0), &EndomorphismField::identity(3), &opts).unwrap();
    assert_eq!(c.t_interval.0, f64::NEG_INFINITY);
    assert!((c.t_interval.1 - 0.5).abs() < 1e-15);
    let c = build_cylinder_from_a(&flat(3, 1.0), &diag(&[1.0, 2.0, 3.0]), &opts).unwrap();
    assert!((c.t_interval.1 - 1.0 / 6.0).abs() < 1e-15);
    assert_eq!(c.t_interval.0, f64::NEG_INFINITY);
    let c = build_cylinder_from_a(&flat(3, 1.0), &diag(&[-2.0, -1.5, -1.0]), &opts).unwrap();
    assert!((c.t_interval.0 + 0.25).abs() < 1e-15);
    assert_eq!(c.t_interval.1, f64::INFINITY);
    // Window endpoints are shrunk inwards.
    assert!((c.t_window.0 + 0.25 * (1.0 - ENDPOINT_SHRINK)).abs() < 1e-15);
}

#[test]
fn from_a_matches_h_form() {
    // (1 − 2tA)^* g_0 with A = diag(1, 2, 3) equals (A⁻¹ − 2t)^*(A^* g_0).
    let a = diag(&[1.0, 2.0, 3.0]);
    let c = build_cylinder_from_a(&flat(3, 1.0), &a, &CylinderOptions::default()).unwrap();
    let t = 0.1;
    let at = DMatrix::from_diagonal(&DVector::from_vec(vec![0.8, 0.6, 0.4]));
    let expect = &at * &at;
    assert!((c.slice_metric(t, &[0.1, 0.2, 0.3]) - expect).amax() < 1e-14);
}

#[test]
fn weingarten_for_identity() {
    let c = cylinder_torus_identity().unwrap();
    let p = [0.0, 1.0, 2.0, 3.0];
    assert!((c.weingarten(0.0, &p).unwrap() - DMatrix::identity(4, 4) * 2.0).amax() < 1e-15);
    assert!((c.weingarten(0.25, &p).unwrap() - DMatrix::identity(4, 4) * 4.0).amax() < 1e-14);
    assert!((c.t_interval.1 - 0.5).abs() < 1e-12);
}

#[test]
fn non_codazzi_h_is_rejected() {
    let wp = WarpedProductModel::standard(flat_torus(2), (-0.5, 0.5));
    let h = EndomorphismField::new("bad", Arc::new(|p: &[f64]| DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0 + p[1].sin(), 2.0]))));
    match build_cylinder(&wp, &h, &CylinderOptions::default()) {
        Err(Error::NonCodazziH { .. }) => {}
        other => panic!("expected NonCodazziH, got {other:?}"),
    }
}

#[test]
fn identities_on_torus_cylinder() {
    let c = cylinder_torus().unwrap();
    for r in verify_identities(&c, 6, 3).unwrap() {
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
fn identities_on_eh_cylinder() {
    let c = cylinder_eh().unwrap();
    for r in verify_identities(&c, 4, 5).unwrap() {
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
fn flat_fiber_gives_flat_cylinder() {
    let flat_c = max_curvature(&cylinder_torus().unwrap(), 8, 1).unwrap();
    assert!(flat_c < 1e-6, "{flat_c}");
    let curved = max_curvature(&cylinder_eh().unwrap(), 4, 1).unwrap();
    assert!(curved > 1e-2, "{curved}");
}

#[test]
fn pq_frame() {
    let c = cylinder_torus().unwrap();
    for q in [[0.1, 0.2, 1.0, 2.0, 3.0], [-0.3, -0.2, 4.0, 0.5, 5.0]] {
        let s = pq_fields(&c, &q).unwrap();
        assert!(s.g_pp.abs() < 1e-12 && s.g_qq.abs() < 1e-12, "{s:?}");
        assert!((s.g_pq - 1.0).abs() < 1e-12, "{s:?}");
        assert!(s.parallel_residual < 1e-6, "{s:?}");
    }
    let bad = build_cylinder_on(&flat(2, 1.0), &EndomorphismField::identity(2), &CylinderOptions::default()).unwrap();
    assert_eq!(p_field(&bad, &[0.0, 0.0, 0.0]), Err(Error::WrongBase));
}

#[test]
fn p_returns_after_transport() {
    let c = cylinder_eh().unwrap();
    let a = [0.0, 0.0, 2.0, 1.2, 3.0, 2.0];
    let b = [0.2, -0.1, 2.1, 1.3, 3.05, 2.1];
    let d = p_transport_defect(&c, &CurvePath::segment(&a, &b), &TransportOptions::default()).unwrap();
    assert!(d < 1e-7, "{d}");
}

#[test]
fn az_transport_along_t_line() {
    let c = cylinder_torus().unwrap();
    let z = DVector::from_vec(vec![0.3, -0.2, 0.5]);
    let curve = CurvePath::segment(&[0.0, 0.0, 1.0, 2.0, 3.0], &[0.3, 0.0, 1.0, 2.0, 3.0]);
    let r = transport_az(&c, &curve, &z, &TransportOptions::default()).unwrap();
    assert!(r.a.iter().all(|a| a.abs() < 1e-15));
    let hti = c.h_t_inv(0.3, &[0.0, 1.0, 2.0, 3.0]).unwrap();
    let expect = c.lift(&(hti * DVector::from_vec(vec![0.0, 0.3, -0.2, 0.5])));
    assert!((&r.generic - &expect).amax() < 1e-9, "{:?}", r.generic - expect);
    assert!(r.discrepancy < 1e-9);
}

#[test]
fn az_transport_closed_loop_in_flat_fiber() {
    let c = cylinder_torus().unwrap();
    let v = vec![
        vec![0.0, 0.0, 1.0, 2.0, 3.0],
        vec![0.1, 0.2, 1.3, 2.0, 3.0],
        vec![-0.1, 0.1, 1.3, 2.4, 3.2],
        vec![0.0, 0.0, 1.0, 2.0, 3.0],
    ];
    let curve = CurvePath::polyline(&v, false);
    for i in 0..3 {
        let mut z = DVector::zeros(3);
        z[i] = 1.0;
        let r = transport_az(&c, &curve, &z, &TransportOptions::default()).unwrap();
        assert!(r.a.last().unwrap().abs() < 1e-12, "{:?}", r.a.last());
        assert!(r.discrepancy < 1e-8, "{}", r.discrepancy);
    }
}

#[test]
fn az_transport_along_fiber_geodesic_is_linear() {
    let c = cylinder_torus().unwrap();
    let z = DVector::from_vec(vec![0.4, 0.1, -0.3]);
    let curve = CurvePath::segment(&[0.0, 0.0, 1.0, 2.0, 3.0], &[0.0, 0.0, 1.5, 2.2, 2.9]);
    let r = transport_az(&c, &curve, &z, &TransportOptions::default()).unwrap();
    let n = r.a.len() - 1;
    let slope = r.a[n];
    for (k, a) in r.a.iter().enumerate() {
        assert!((a - slope * k as f64 / n as f64).abs() < 1e-12);
    }
    assert!((slope - 2.0 * (0.4 * 0.5 + 0.1 * 0.2 - 0.3 * -0.1)).abs() < 1e-12);
    assert!(r.discrepancy < 1e-8, "{}", r.discrepancy);
}

#[test]
fn causality_for_identity_h() {
    let c = cylinder_torus_identity().unwrap();
    let grid = CausalityGrid { t_values: vec![-1.0, -0.5, -0.25, 0.0], points: CausalityGrid::for_cylinder(&c, 1, 3, 10, 1).points };
    let rep = causality_bounds(&c, &grid, true);
    for s in &rep.slices {
        assert!((s.gh - 1.0 / (1.0 - 2.0 * s.t)).abs() < 1e-10, "{s:?}");
        assert!((s.bbc - 4.0 / (1.0 - 2.0 * s.t)).abs() < 1e-10, "{s:?}");
    }
    assert!(rep.globally_hyperbolic() && rep.bbc());
    assert!(!causality_bounds(&c, &grid, false).globally_hyperbolic());
}

#[test]
fn static_family_has_zero_bbc_bound() {
    let grid = CausalityGrid { t_values: vec![-0.5, 0.5], points: vec![vec![0.0, 0.0], vec![1.0, 2.0]] };
    let g = |p: &[f64]| DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 + p[0] * p[0], 2.0]));
    let rep = causality_bounds_general(|_t, p| (g(p), DMatrix::zeros(2, 2)), g, &grid, true);
    assert_eq!(rep.bbc_bound, 0.0);
    assert!((rep.gh_bound - 1.0).abs() < 1e-14);
}

#[test]
fn eh_cylinder_has_finite_bounds() {
    let c = cylinder_eh().unwrap();
    let grid = CausalityGrid::for_cylinder(&c, 5, 3, 20, 2);
    let rep = causality_bounds(&c, &grid, true);
    assert!(rep.gh_established && rep.bbc_established, "{rep:?}");
    assert!(rep.bbc());
}
