use super::*;
use crate::cylinder::{adapted_basis, p_field};
use crate::geometry::{riemann, CurvePath, ManifoldModel, TransportOptions};
use crate::warped::EndomorphismField;
use crate::zoo::{cylinder_eh, cylinder_product, cylinder_torus, flat, flat_torus, product_model, round_sphere, warped_torus, EguchiHansonModel};
use crate::Error;
use nalgebra::DVector;
use std::time::Instant;

const EH_POINT: [f64; 4] = [1.5, 1.5, 3.0, 3.0];

fn both(model: &ManifoldModel, bp: &[f64]) -> CrossValidated {
    let t = Instant::now();
    let r = holonomy_both(model, bp, &HolonomyOptions::default()).unwrap();
    eprintln!("{}: dims {} {} {} in {:?}", model.name, r.loops.dimension, r.curvature.dimension, r.combined.dimension, t.elapsed());
    r
}

fn check_estimate(e: &HolonomyEstimate) {
    assert!(e.skew_residual < 1e-6, "{}", e.skew_residual);
    assert!(e.closure_residual < 1e-6, "{}", e.closure_residual);
    assert!(e.stable());
    assert!(e.gap_ratio >= 10.0);
}

fn cylinder_point(x: &[f64]) -> Vec<f64> {
    let mut q = vec![0.0, 0.0];
    q.extend_from_slice(x);
    q
}

#[test]
fn flat_space_is_trivial() {
    let m = flat(3, 1.0);
    let r = both(&m, &[0.0, 0.0, 0.0]);
    assert!(r.agree(1e-6));
    assert_eq!(r.combined.dimension, 0);
    let c = classify_blocks(&r.combined, &m.metric(&[0.0; 3]), None, None).unwrap();
    assert_eq!(c.verdict, Verdict::Trivial);
}

#[test]
fn warped_flat_torus_has_full_so4() {
    let wp = warped_torus(3, (-0.5, 0.5));
    let m = wp.model();
    let bp = [0.0, 1.0, 2.0, 3.0];
    let r = both(&m, &bp);
    assert!(r.agree(1e-6));
    assert_eq!(r.loops.dimension, 6);
    check_estimate(&r.loops);
    check_estimate(&r.curvature);
    let c = classify_blocks(&r.combined, &m.metric(&bp), None, None).unwrap();
    assert_eq!(c.verdict, Verdict::Irreducible);
}

#[test]
fn warped_curvature_is_s_wedge_y() {
    let m = warped_torus(3, (-0.5, 0.5)).model();
    let p = [0.0, 1.0, 2.0, 3.0];
    let r = riemann(&m, &p).unwrap();
    let ds = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
    let y = DVector::from_vec(vec![0.0, 0.3, -0.5, 0.2]);
    let b = r.endomorphism(&ds, &y);
    assert!((&b * &ds - &y * 4.0).amax() < 1e-6);
    for k in 1..4 {
        let mut u = DVector::zeros(4);
        u[k] = 1.0;
        let expect = &ds * (-4.0 * y[k]);
        assert!((&b * &u - expect).amax() < 1e-6);
    }
}

#[test]
fn eguchi_hanson_has_su2() {
    let m = EguchiHansonModel::new(1.0).model();
    let r = both(&m, &EH_POINT);
    assert!(r.agree(1e-6));
    assert_eq!(r.curvature.dimension, 3);
    check_estimate(&r.loops);
    let c = classify_blocks(&r.combined, &m.metric(&EH_POINT), None, None).unwrap();
    assert_eq!(c.verdict, Verdict::Irreducible);
}

#[test]
fn flat_fiber_cylinder_is_trivial() {
    let c = cylinder_torus().unwrap();
    let m = c.model();
    let r = both(&m, &cylinder_point(&[1.0, 2.0, 3.0]));
    assert!(r.agree(1e-6));
    assert_eq!(r.combined.dimension, 0);
}

#[test]
fn eh_cylinder_is_weakly_irreducible() {
    let c = cylinder_eh().unwrap();
    let m = c.model();
    let bp = cylinder_point(&EH_POINT);
    let r = both(&m, &bp);
    assert!(r.agree(1e-6));
    assert_eq!(r.combined.dimension, 7);
    let frame = AdaptedFrame { basis: adapted_basis(&c, &bp).unwrap(), factor_dims: vec![4] };
    let p = p_field(&c, &bp).unwrap();
    let cl = classify_blocks(&r.combined, &m.metric(&bp), Some(&p), Some(&frame)).unwrap();
    assert!(cl.stabilized_vector.is_some());
    assert!(cl.pattern_residual.unwrap() < 1e-6);
    assert_eq!(cl.blocks[0].h_rank, 3);
    assert_eq!(cl.blocks[0].m_rank, 4);
    assert_eq!(cl.verdict, Verdict::WeaklyIrreducible);
}

#[test]
fn product_fiber_cylinder_is_decomposable() {
    let c = cylinder_product().unwrap();
    let m = c.model();
    let bp = cylinder_point(&[1.0, EH_POINT[0], EH_POINT[1], EH_POINT[2], EH_POINT[3]]);
    let r = both(&m, &bp);
    assert!(r.agree(1e-6));
    let frame = AdaptedFrame { basis: adapted_basis(&c, &bp).unwrap(), factor_dims: vec![1, 4] };
    let p = p_field(&c, &bp).unwrap();
    let cl = classify_blocks(&r.combined, &m.metric(&bp), Some(&p), Some(&frame)).unwrap();
    assert_eq!(cl.verdict, Verdict::Decomposable);
    assert!(cl.invariant_subspaces.iter().any(|s| s.label == "factor 0" && s.invariant() && !s.degenerate));
    assert_eq!(cl.blocks[0].m_rank, 0);
    assert_eq!(cl.blocks[1].m_rank, 4);
}

#[test]
fn m_part_of_eh_factor_is_nonzero() {
    let c = cylinder_eh().unwrap();
    let opts = TransportOptions { tol: 1e-11, ..TransportOptions::default() };
    let pr = m_nonvanishing_probe(&c, &EH_POINT, &[4], 0, 6, 3, &opts).unwrap();
    assert!(pr.max_projection >= 1e-3);
    assert!(pr.formula_discrepancy < 1e-6);
    assert!(pr.ode_discrepancy < 1e-8);
}

#[test]
fn m_part_of_flat_factor_vanishes() {
    let c = cylinder_torus().unwrap();
    let pr = m_nonvanishing_probe(&c, &[1.0, 2.0, 3.0], &[3], 0, 4, 3, &TransportOptions::default()).unwrap();
    assert!(pr.max_projection < 1e-8, "{pr:?}");
    assert!(pr.samples.iter().all(|s| s.closed_form.abs() < 1e-12));
}

#[test]
fn pullback_conjugates_holonomy() {
    let (g, a) = product_model(&[flat_torus(1), EguchiHansonModel::new(1.0).model()], &[2.0, 3.0]).unwrap();
    let bp = [1.0, EH_POINT[0], EH_POINT[1], EH_POINT[2], EH_POINT[3]];
    let chk = conjugation_check(&g, &a, &bp, &HolonomyOptions::default()).unwrap();
    assert_eq!(chk.original.dimension, 3);
    assert!(chk.matches(1e-6), "{}", chk.span_distance);
}

#[test]
fn open_and_large_loops_are_rejected() {
    let m = flat(2, 1.0);
    let open = CurvePath::polyline(&[vec![0.0, 0.0], vec![0.1, 0.0], vec![0.1, 0.1]], false);
    match loop_holonomy_with(&m, &[0.0, 0.0], &[open], &TransportOptions::default()) {
        Err(Error::OpenLoop { .. }) => {}
        other => panic!("{other:?}"),
    }
    let s = round_sphere(0.2);
    let bp = [1.0, 1.0];
    let big = CurvePath::plaquette(&bp, 0, 1, 1.2);
    match loop_holonomy_with(&s, &bp, &[big], &TransportOptions::default()) {
        Err(Error::LogDivergence { distance }) => assert!(distance >= 1.0),
        other => panic!("{other:?}"),
    }
}

#[test]
fn identity_pullback_is_a_no_op() {
    let m = EguchiHansonModel::new(1.0).model();
    let chk = conjugation_check(&m, &EndomorphismField::identity(4), &EH_POINT, &HolonomyOptions::default()).unwrap();
    assert!(chk.matches(1e-9));
}

