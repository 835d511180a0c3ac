use super::*;
use crate::geometry::{
    christoffel, frame_commutators, frame_connection_table, frame_connection_table_chart, numerical_frame_commutators, riemann,
};
use crate::sampling;
use crate::warped::max_codazzi_residual;
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

fn eh_points(eh: &EguchiHansonModel, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = sampling::rng(seed);
    sampling::random_points(&mut rng, &eh.chart(), 0.02, count)
}

#[test]
fn eh_gamma_at_reference_point() {
    let eh = EguchiHansonModel::new(1.0);
    // f = (15/16)^{1/2}, γ = 2/(rf) − f/r at r = 2
    let f = (15.0f64 / 16.0).sqrt();
    assert!((eh.f(2.0) - f).abs() < 1e-15);
    assert!((eh.gamma(2.0) - 0.5486726407127173).abs() < 1e-14);
    for r in [1.3, 2.0, 3.7] {
        assert!((eh.fprime(r) + eh.f(r) / r - eh.gamma(r)).abs() < 1e-13);
    }
}

#[test]
fn eh_frame_is_orthonormal_and_derivatives_match() {
    let eh = EguchiHansonModel::new(1.0);
    let m = eh.model();
    let diag = m.diagnose(&eh_points(&eh, 20, 1));
    assert!(diag.max_frame_defect < 1e-12, "{diag:?}");
    assert!(diag.max_derivative_mismatch < 1e-8, "{diag:?}");
    assert_eq!(diag.signature_violations, 0);
}

#[test]
fn eh_metric_matches_sigma_form() {
    let eh = EguchiHansonModel::new(1.3);
    let p = [2.1, 0.9, 1.7, 2.5];
    let s = EguchiHansonModel::sigma(p[1], p[3]);
    let f2 = 1.0 - (1.3f64 / p[0]).powi(4);
    let mut g = DMatrix::zeros(4, 4);
    g[(0, 0)] = 1.0 / f2;
    for (a, w) in [p[0] * p[0], p[0] * p[0], p[0] * p[0] * f2].iter().enumerate() {
        let row = DVector::from_vec(vec![0.0, s[(a, 0)], s[(a, 1)], s[(a, 2)]]);
        g += &row * row.transpose() * *w;
    }
    assert!((eh.metric(&p) - g).amax() < 1e-13);
}

#[test]
fn eh_commutators_match_numerical_brackets() {
    let eh = EguchiHansonModel::new(1.0);
    let m = eh.model();
    for p in eh_points(&eh, 10, 2) {
        let a = frame_commutators(&m, &p).unwrap();
        let b = numerical_frame_commutators(&m, &p).unwrap();
        let d = a.iter().zip(&b).fold(0.0_f64, |x, (u, v)| x.max((u - v).abs()));
        assert!(d < 1e-8, "{d}");
    }
}

#[test]
fn eh_connection_table_matches_koszul_and_chart() {
    let eh = EguchiHansonModel::new(1.0);
    let m = eh.model();
    for p in eh_points(&eh, 10, 3) {
        let t = eh.connection_table(p[0]);
        let k = frame_connection_table(&m, &p).unwrap();
        let c = frame_connection_table_chart(&m, &p).unwrap();
        for i in 0..64 {
            assert!((t[i] - k[i]).abs() < 1e-12, "koszul {i}");
            assert!((t[i] - c[i]).abs() < 1e-8, "chart {i}");
        }
        // ∇_{e_0} e_k = 0
        assert!(t[..16].iter().all(|&v| v == 0.0));
    }
}

#[test]
fn corrupted_gamma_shows_in_table() {
    let eh = EguchiHansonModel::new(1.0).with_gamma_offset(1e-3);
    let m = eh.model();
    let p = [2.0, 1.0, 1.0, 1.0];
    let t = eh.connection_table(2.0);
    let k = frame_connection_table(&m, &p).unwrap();
    let d = t.iter().zip(&k).fold(0.0_f64, |x, (u, v)| x.max((u - v).abs()));
    assert!((d - 1e-3).abs() < 1e-12);
}

#[test]
fn eh_is_ricci_flat_but_curved() {
    let eh = EguchiHansonModel::new(1.0);
    let m = eh.model();
    for p in eh_points(&eh, 3, 4) {
        let r = riemann(&m, &p).unwrap();
        assert!(r.ricci.amax() < 1e-6, "{}", r.ricci.amax());
        assert!(r.max_abs() > 1e-2);
        assert!(r.symmetry_residuals().max() < 1e-6);
    }
}

#[test]
fn hessian_fixture() {
    let h = flat_hessian_codazzi(3, Arc::new(|p: &[f64]| p[0].powi(3)), 1e-2);
    let m = flat(3, 1.0);
    let p = [0.3, -0.2, 0.1];
    let mut expect = DMatrix::zeros(3, 3);
    expect[(0, 0)] = 6.0 * 0.3;
    assert!((h.at(&p) - expect).amax() < 1e-9);
    let mut rng = sampling::rng(5);
    let pts = sampling::random_points(&mut rng, &m.chart, 0.1, 10);
    assert!(max_codazzi_residual(&m, &h, &pts).unwrap() < 1e-6);
    let id = flat_hessian_codazzi(3, Arc::new(|p: &[f64]| 0.5 * p.iter().map(|x| x * x).sum::<f64>()), 1e-2);
    assert!((id.at(&p) - DMatrix::identity(3, 3)).amax() < 1e-9);
    let lin = flat_hessian_codazzi(3, Arc::new(|p: &[f64]| 2.0 * p[0] - p[2]), 1e-2);
    assert!(lin.at(&p).amax() < 1e-10);
}

#[test]
fn cone_over_sphere_is_flat_and_t_is_codazzi() {
    let cone = ConeModel::new(round_sphere(0.3), (0.5, 2.0));
    let m = cone.model();
    let t = cone_codazzi(&cone);
    let mut rng = sampling::rng(6);
    let pts = sampling::random_points(&mut rng, &m.chart, 0.05, 5);
    for p in &pts {
        let r = riemann(&m, p).unwrap();
        assert!(r.max_abs() < 1e-6);
        let mut ev = t.eigenvalues(&m, p);
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(ev[0].abs() < 1e-12);
        assert!((ev[1] - 1.0 / p[0]).abs() < 1e-10 && (ev[2] - 1.0 / p[0]).abs() < 1e-10);
        let dr = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let v = DVector::from_vec(vec![0.0, 0.3, -0.7]);
        let w = DVector::from_vec(vec![0.1, 1.0, 0.4]);
        assert!(r.apply(&v, &w, &dr).amax() < 1e-6);
    }
    assert!(max_codazzi_residual(&m, &t, &pts).unwrap() < 1e-6);
}

#[test]
fn product_of_torus_and_eh() {
    let eh = EguchiHansonModel::new(1.0);
    let (m, t) = product_model(&[flat_torus(1), eh.model()], &[1.0, 2.0]).unwrap();
    assert_eq!(m.dim, 5);
    let p = [1.0, 2.0, 1.0, 1.0, 1.0];
    assert_eq!(t.at(&p)[(0, 0)], 1.0);
    assert_eq!(t.at(&p)[(3, 3)], 2.0);
    let diag = m.diagnose(&[p.to_vec()]);
    assert!(diag.max_frame_defect < 1e-12 && diag.max_derivative_mismatch < 1e-8);
    assert!(max_codazzi_residual(&m, &t, &[p.to_vec()]).unwrap() < 1e-8);
    let k = frame_connection_table(&m, &p).unwrap();
    let c = frame_connection_table_chart(&m, &p).unwrap();
    assert!(k.iter().zip(&c).all(|(a, b)| (a - b).abs() < 1e-8));
    assert!(product_model(&[], &[]).is_err());
}

#[test]
fn sphere_christoffel_fixture() {
    let s = round_sphere(0.2);
    let g = christoffel(&s, &[1.0, 1.0]).unwrap();
    assert!((g.get(0, 1, 1) + 1.0f64.sin() * 1.0f64.cos()).abs() < 1e-12);
}

#[test]
fn chebyshev_differentiates_polynomials() {
    let (r, d) = chebyshev(12, 1.0, 3.0);
    let v = DVector::from_iterator(13, r.iter().map(|x| x.powi(5)));
    let dv = d * v;
    for (i, x) in r.iter().enumerate() {
        assert!((dv[i] - 5.0 * x.powi(4)).abs() < 1e-9);
    }
    let (x, w) = gauss_legendre(8);
    let s: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(14)).sum();
    assert!((s - 2.0 / 15.0).abs() < 1e-14);
}

#[test]
fn obstruction_steps() {
    let eh = EguchiHansonModel::new(1.0);
    let rep = eh_codazzi_obstruction(&eh, 16).unwrap();
    assert_eq!(rep.solution_dim, 1, "{rep:?}");
    assert_eq!(rep.solution_dim_refined, 1);
    assert!(rep.identity_defect < 1e-8, "{rep:?}");
    assert!(rep.homothetic_sigma_min >= 1e-3, "{rep:?}");
    let dims: Vec<usize> = rep.steps.iter().map(|s| s.null_dim).collect();
    assert_eq!(dims, vec![1, 0, 3, 2, 1], "{rep:?}");
    for s in &rep.steps {
        assert!(s.residual < 1e-8, "{s:?}");
    }
    assert!(rep.verdict());
}

#[test]
fn sphere_averaging_commutes_with_codazzi() {
    let eh = EguchiHansonModel::new(1.0);
    for seed in 0..3 {
        let c = averaging_check(&eh, 1.8, seed).unwrap();
        assert!(c.idempotence < 1e-12, "{c:?}");
        assert!(c.commutation < 1e-7, "{c:?}");
        assert!(c.angular_spread < 1e-14, "{c:?}");
    }
}
