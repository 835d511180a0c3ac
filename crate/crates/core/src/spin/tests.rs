use super::*;
use crate::cylinder::{build_cylinder, CylinderOptions};
use crate::warped::{pullback_model, EndomorphismField, WarpedProductModel};
use crate::zoo::{cylinder_eh, cylinder_torus, flat, torus_codazzi, warped_eh, warped_torus, EguchiHansonModel};
use crate::{sampling, Error};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use std::sync::Arc;

const EH_POINT: [f64; 4] = [1.5, 1.5, 3.0, 3.0];
const TORUS_POINT: [f64; 3] = [1.0, 2.0, 3.0];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn random_spinor(seed: u64, d: usize) -> CVec {
    let mut rng = sampling::rng(seed);
    let re = sampling::random_vector(&mut rng, d);
    let im = sampling::random_vector(&mut rng, d);
    let v = CVec::from_fn(d, |i, _| c(re[i], im[i]));
    let n = cnorm(&v);
    v * c(1.0 / n, 0.0)
}

fn root(x: &[f64]) -> Vec<f64> {
    let mut r = vec![0.0];
    r.extend(x);
    r
}

fn eh_warped() -> WarpedProductModel {
    warped_eh(&EguchiHansonModel::new(1.0), (-0.5, 0.5))
}

#[test]
fn clifford_relations_up_to_dimension_eight() {
    for n in 1..=8 {
        for p in 0..=n.min(2) {
            let r = clifford_rep(p, n - p).unwrap();
            assert!(r.relation_residual() < 1e-12);
            assert_eq!(r.module_dim, 1 << (n / 2));
        }
    }
    assert_eq!(clifford_rep(1, 8), Err(Error::DimTooLarge { dim: 9 }));
}

#[test]
fn kappa_realizes_euclidean_clifford_action() {
    let m = SpinorModule::new(2).unwrap();
    let id = m.rep.identity();
    assert!(cmax(&(&m.kappas[0] * &m.kappas[0] + &id)) < 1e-15);
    assert!(cmax(&(&m.kappas[0] * &m.kappas[1] + &m.kappas[1] * &m.kappas[0])) < 1e-15);
    for n in 1..=7 {
        let m = SpinorModule::new(n).unwrap();
        for k in &m.kappas {
            // Skew for ⟨·,·⟩₀.
            assert!(cmax(&(k.adjoint() + k)) < 1e-15);
        }
    }
}

#[test]
fn inner_products_on_a_basis() {
    let m = SpinorModule::new(3).unwrap();
    let r = &m.rep;
    let d = r.module_dim;
    let basis: Vec<CVec> = (0..d).map(|i| CVec::from_fn(d, |j, _| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })).collect();
    for u in &basis {
        for v in &basis {
            let lhs = r.inner1(u, v);
            let rhs = r.inner0(&(&r.gammas[0] * u), v);
            assert!((lhs - rhs).norm() < 1e-15);
            for a in 0..r.dim() {
                // x• symmetric for ⟨·,·⟩₁.
                let g = &r.gammas[a];
                assert!((r.inner1(&(g * u), v) - r.inner1(u, &(g * v))).norm() < 1e-15);
            }
            for k in &m.kappas {
                assert!((r.inner0(&(k * u), v) + r.inner0(u, &(k * v))).norm() < 1e-15);
            }
        }
    }
}

#[test]
fn hat_map_flips_sign_in_dimension_three() {
    let m = SpinorModule::new(3).unwrap();
    let u = random_spinor(4, m.module_dim());
    for j in 0..3 {
        let lhs = &m.kappas[j] * m.hat(&u);
        let rhs = -m.hat(&(&m.kappas[j] * &u));
        assert!(cnorm(&(lhs - rhs)) < 1e-14);
    }
}

#[test]
fn parity_projectors_split_odd_modules() {
    let m = SpinorModule::new(5).unwrap();
    let p = m.parity_projector(Parity::Plus);
    let q = m.parity_projector(Parity::Minus);
    assert!(cmax(&(&p * &p - &p)) < 1e-14);
    assert!(cmax(&(&p + &q - m.rep.identity())) < 1e-14);
    assert!((p.trace().re - 4.0).abs() < 1e-14);
    for k in &m.kappas {
        assert!(cmax(&(k * &p - &p * k)) < 1e-14);
    }
    assert_eq!(m.parity_dim(Parity::Plus), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn kappa_squares_to_minus_norm(x in proptest::collection::vec(-2.0f64..2.0, 4)) {
        let m = SpinorModule::new(4).unwrap();
        let k = m.kappa(&x);
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        prop_assert!(cmax(&(&k * &k + m.rep.identity() * c(norm2, 0.0))) < 1e-12);
    }
}

#[test]
fn flat_frame_has_zero_spin_connection() {
    let model = flat(3, 1.0);
    let m = SpinorModule::new(3).unwrap();
    let frame = model_frame(&model).unwrap();
    let om = spin_connection(&m, &model, &frame, &[0.1, 0.2, 0.3], &DVector::from_vec(vec![0.3, -1.0, 2.0])).unwrap();
    assert!(cmax(&om) < 1e-14);
    let pb = pullback_model(&model, &EndomorphismField::identity(3));
    assert_eq!(model_frame(&pb).err(), Some(Error::MissingFrame));
}

#[test]
fn spin_connection_commutes_with_clifford_action() {
    // [Ω(x), e_m⋆] = (∇_x e_m)⋆ on the warped Eguchi–Hanson product.
    let model = eh_warped().model();
    let m = SpinorModule::new(5).unwrap();
    let frame = model_frame(&model).unwrap();
    let p = root(&EH_POINT);
    let x = DVector::from_vec(vec![0.3, -0.2, 0.5, 0.1, 0.4]);
    let om = spin_connection(&m, &model, &frame, &p, &x).unwrap();
    let w = frame_one_form(&model, &frame, &p, &x).unwrap();
    for mm in 0..5 {
        let lhs = &om * &m.kappas[mm] - &m.kappas[mm] * &om;
        let rhs = m.kappa(w.row(mm).transpose().as_slice());
        assert!(cmax(&(lhs - rhs)) < 1e-10);
    }
}

#[test]
fn spinor_curvature_matches_connection_curvature() {
    let model = eh_warped().model();
    let m = SpinorModule::new(5).unwrap();
    let frame = model_frame(&model).unwrap();
    let p = root(&EH_POINT);
    for (i, j) in [(0, 1), (1, 2), (2, 4)] {
        let fd = spin_connection_curvature_fd(&m, &model, &frame, &p, i, j).unwrap();
        let mut x = DVector::zeros(5);
        let mut y = DVector::zeros(5);
        x[i] = 1.0;
        y[j] = 1.0;
        let r = spinor_curvature(&m, &model, &frame, &p, &x, &y).unwrap();
        assert!(cmax(&(&fd - &r)) < 1e-6, "{i}{j}: {:e}", cmax(&(fd - r)));
    }
}

#[test]
fn ricci_identity_for_spinor_curvature() {
    // Ric(X)⋆ψ = −2 Σ_k e_k⋆R^S(X, e_k)ψ for an arbitrary spinor.
    let model = eh_warped().model();
    let m = SpinorModule::new(5).unwrap();
    let frame = model_frame(&model).unwrap();
    let p = root(&EH_POINT);
    let psi = random_spinor(9, m.module_dim());
    let e = frame(&p);
    let ric = crate::geometry::riemann(&model, &p).unwrap().ricci_endomorphism();
    for a in 0..5 {
        let x = e.column(a).into_owned();
        let ricx = e.clone().lu().solve(&(&ric * &x)).unwrap();
        let lhs = m.kappa(ricx.as_slice()) * &psi;
        let mut rhs = CVec::zeros(m.module_dim());
        for k in 0..5 {
            let rs = spinor_curvature(&m, &model, &frame, &p, &x, &e.column(k).into_owned()).unwrap();
            rhs += &m.kappas[k] * rs * &psi * c(-2.0, 0.0);
        }
        assert!(cnorm(&(&lhs - &rhs)) < 1e-6, "{a}: {:e}", cnorm(&(lhs - rhs)));
    }
}

#[test]
fn transport_is_unitary() {
    // A = 0 integrates the spin connection itself, which preserves ‖·‖₀.
    let wp = eh_warped();
    let model = wp.model();
    let module = Arc::new(SpinorModule::new(5).unwrap());
    let frame = model_frame(&model).unwrap();
    let zero = EndomorphismField::constant("0", DMatrix::zeros(5, 5));
    let psi0 = random_spinor(2, 8);
    let opts = IntegrationOptions { tol: f64::INFINITY, ..Default::default() };
    let (field, _) = integrate_codazzi_spinor(&model, &frame, module, &zero, &root(&EH_POINT), psi0, Parity::Full, &opts).unwrap();
    for p in local_samples(&model, &root(&EH_POINT), 0.3, 4, 1) {
        assert!((field.norm_sq(&p).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn parallel_spinor_has_zero_codazzi_residual() {
    let model = flat(3, 1.0);
    let module = Arc::new(SpinorModule::new(3).unwrap());
    let field = SpinorField::constant(model.clone(), model_frame(&model).unwrap(), module, Parity::Full, random_spinor(1, 4));
    let zero = EndomorphismField::constant("0", DMatrix::zeros(3, 3));
    let r = codazzi_spinor_residual(&field, &zero, &local_samples(&model, &[0.0; 3], 0.5, 3, 2)).unwrap();
    assert!(r.residual < 1e-12 && r.recovery_residual < 1e-12, "{r:?}");
}

#[test]
fn vanishing_spinor_is_rejected() {
    let model = flat(3, 1.0);
    let module = Arc::new(SpinorModule::new(3).unwrap());
    let field = SpinorField::constant(model.clone(), model_frame(&model).unwrap(), module, Parity::Full, CVec::zeros(4));
    assert!(matches!(dirac_current(&field, &[0.0; 3]), Err(Error::VanishingSpinor { .. })));
    let zero = EndomorphismField::constant("0", DMatrix::zeros(3, 3));
    assert!(matches!(codazzi_spinor_residual(&field, &zero, &[vec![0.0; 3]]), Err(Error::VanishingSpinor { .. })));
}

fn check_killing(wp: &WarpedProductModel, x0: &[f64]) -> KillingSpinor {
    let ks = construct_warped_killing_spinor(wp, None, x0, &KillingOptions::default()).unwrap();
    let samples = local_samples(&ks.field.model, &root(x0), 0.3, 4, 8);
    let rep = check_warped_killing(&ks, &samples).unwrap();
    eprintln!("{}: {rep:?} parallel {:e} path {:e}", wp.fiber.name, ks.fiber_parallel_residual, ks.tree.path_discrepancy);
    assert!(rep.killing_residual <= 1e-6, "{rep:?}");
    assert!(rep.recovery_residual <= 1e-6, "{rep:?}");
    assert!(rep.norm_profile_residual <= 1e-5, "{rep:?}");
    assert!(rep.current_residual <= 1e-5, "{rep:?}");
    assert!(rep.q_max <= 1e-8, "{rep:?}");
    ks
}

#[test]
fn killing_spinor_on_warped_torus() {
    let ks = check_killing(&warped_torus(3, (-0.5, 0.5)), &TORUS_POINT);
    assert_eq!(ks.field.parity, Parity::Full);
    let b = EndomorphismField::identity(4);
    let r = current_derivative_residual(&ks.field, &b, &[0.2, 1.1, 2.0, 2.9]).unwrap();
    assert!(r < 1e-6, "{r:e}");
}

#[test]
fn killing_spinor_on_warped_eguchi_hanson() {
    let ks = check_killing(&eh_warped(), &EH_POINT);
    assert_ne!(ks.field.parity, Parity::Full);
    assert!(ks.field.parity_residual(&[0.2, 1.6, 1.4, 3.1, 2.9]).unwrap() < 1e-10);
    // Integrability is the curvature identity R^S(X,Y)ψ = (X⋆Y − Y⋆X)⋆ψ.
    let p = [0.1, 1.4, 1.6, 2.9, 3.1];
    let psi = ks.field.at(&p).unwrap();
    let e = (ks.field.frame)(&p);
    for (a, b) in [(0, 1), (1, 3), (2, 4)] {
        let rs = spinor_curvature(&ks.field.module, &ks.field.model, &ks.field.frame, &p, &e.column(a).into_owned(), &e.column(b).into_owned()).unwrap();
        let k = &ks.field.module.kappas;
        let rhs = (&k[a] * &k[b] - &k[b] * &k[a]) * &psi;
        assert!(cnorm(&(rs * &psi - rhs)) < 1e-6);
    }
}

#[test]
fn generic_spinor_on_hyperbolic_space_has_positive_q() {
    // On the warped flat torus every initial value integrates; q is constant.
    let wp = warped_torus(3, (-0.5, 0.5));
    let model = wp.model();
    let module = Arc::new(SpinorModule::new(4).unwrap());
    let frame = model_frame(&model).unwrap();
    let r = root(&TORUS_POINT);
    let id = EndomorphismField::identity(4);
    let (field, tree) =
        integrate_codazzi_spinor(&model, &frame, module, &id, &r, random_spinor(6, 4), Parity::Full, &IntegrationOptions::default()).unwrap();
    assert!(tree.path_discrepancy < 1e-10);
    let samples = local_samples(&model, &r, 0.3, 5, 3);
    let qs: Vec<DiracCurrentSample> = samples.iter().map(|p| dirac_current(&field, p).unwrap()).collect();
    let q0 = qs[0].q_value;
    assert!(q0 > 1e-3, "{q0}");
    for s in &qs {
        assert!((s.q_value - q0).abs() < 1e-8, "{} vs {q0}", s.q_value);
        assert!(s.lemma_residual() < 1e-10);
        assert!(s.dist_value > 1e-2);
    }
}

#[test]
fn dimension_three_half_spinors_have_zero_distance() {
    let model = flat(3, 1.0);
    let module = Arc::new(SpinorModule::new(3).unwrap());
    for (seed, parity) in [(1, Parity::Plus), (2, Parity::Minus)] {
        let psi = module.parity_projector(parity) * random_spinor(seed, 4);
        let field = SpinorField::constant(model.clone(), model_frame(&model).unwrap(), module.clone(), parity, psi);
        let s = dirac_current(&field, &[0.0; 3]).unwrap();
        assert!(s.dist_value < 1e-12 && s.q_value.abs() < 1e-12, "{s:?}");
    }
    let mixed = SpinorField::constant(model.clone(), model_frame(&model).unwrap(), module, Parity::Full, random_spinor(3, 4));
    let s = dirac_current(&mixed, &[0.0; 3]).unwrap();
    assert!(s.dist_value > 1e-3 && s.lemma_residual() < 1e-12, "{s:?}");
}

#[test]
fn non_parallel_fiber_spinor_is_rejected() {
    let wp = eh_warped();
    let bad = random_spinor(12, 8);
    let r = construct_warped_killing_spinor(&wp, Some(bad), &EH_POINT, &KillingOptions::default());
    assert!(matches!(r, Err(Error::NonParallelFiber { .. })), "{r:?}");
}

#[test]
fn wrong_killing_eigenspace_is_path_dependent() {
    // κ₀ψ₀ = −iψ₀ is not integrable over the curved fiber.
    let wp = eh_warped();
    let model = wp.model();
    let module = Arc::new(SpinorModule::new(5).unwrap());
    let proj = (module.rep.identity() + &module.kappas[0] * c(0.0, 1.0)) * c(0.5, 0.0);
    let psi0 = proj * random_spinor(5, 8);
    let frame = model_frame(&model).unwrap();
    let r = integrate_codazzi_spinor(&model, &frame, module, &EndomorphismField::identity(5), &root(&EH_POINT), psi0, Parity::Full, &IntegrationOptions::default());
    assert!(matches!(r, Err(Error::HolonomyObstruction { .. })), "{r:?}");
}

#[test]
fn transfer_by_identity_is_trivial() {
    let ks = construct_warped_killing_spinor(&warped_torus(3, (-0.5, 0.5)), None, &TORUS_POINT, &KillingOptions::default()).unwrap();
    let t = phi_a_transfer(&ks.field, &EndomorphismField::identity(4)).unwrap();
    let p = [0.1, 1.1, 2.1, 2.9];
    let (a, b) = (dirac_current(&ks.field, &p).unwrap(), dirac_current(&t, &p).unwrap());
    assert!((a.w - b.w).amax() < 1e-14);
    assert!(matches!(
        phi_a_transfer(&ks.field, &EndomorphismField::constant("0", DMatrix::zeros(4, 4))),
        Err(Error::SingularA { .. })
    ));
}

fn torus_h() -> (WarpedProductModel, EndomorphismField) {
    let c = cylinder_torus().unwrap();
    (c.warped.clone().unwrap(), c.h.clone())
}

#[test]
fn transferred_killing_spinor_is_codazzi_for_the_inverse() {
    let (wp, h) = torus_h();
    let ks = construct_warped_killing_spinor(&wp, None, &TORUS_POINT, &KillingOptions::default()).unwrap();
    let t = phi_a_transfer(&ks.field, &h).unwrap();
    let samples = local_samples(&t.model, &root(&TORUS_POINT), 0.3, 3, 4);
    let r = codazzi_spinor_residual(&t, &h.inverse(), &samples).unwrap();
    assert!(r.residual < 1e-6 && r.recovery_residual < 1e-6, "{r:?}");
    for p in &samples {
        let (a, b) = (dirac_current(&ks.field, p).unwrap(), dirac_current(&t, p).unwrap());
        assert!((a.q_value - b.q_value).abs() < 1e-8);
        // W maps by A⁻¹.
        let expect = h.at(p).lu().solve(&a.w).unwrap();
        assert!((b.w - expect).amax() < 1e-12);
    }
}

#[test]
fn transfer_preserves_q_for_generic_spinors() {
    let model = warped_torus(3, (-0.5, 0.5)).model();
    let module = Arc::new(SpinorModule::new(4).unwrap());
    let a = torus_codazzi(4);
    let mut rng = sampling::rng(21);
    for seed in 0..6 {
        let field = SpinorField::constant(model.clone(), model_frame(&model).unwrap(), module.clone(), Parity::Full, random_spinor(seed, 4));
        let t = phi_a_transfer(&field, &a).unwrap();
        let p = sampling::random_point(&mut rng, &model.chart, 0.1);
        let (x, y) = (dirac_current(&field, &p).unwrap(), dirac_current(&t, &p).unwrap());
        assert!((x.q_value - y.q_value).abs() < 1e-8, "{} {}", x.q_value, y.q_value);
    }
}

fn lifted(cyl: &crate::cylinder::CylinderModel, x0: &[f64]) -> (CylinderSpinor, LiftReport) {
    let wp = cyl.warped.clone().unwrap();
    let ks = construct_warped_killing_spinor(&wp, None, x0, &KillingOptions::default()).unwrap();
    let t = phi_a_transfer(&ks.field, &cyl.h).unwrap();
    let start = std::time::Instant::now();
    let out = lift_to_cylinder(cyl, &t, &LiftOptions::default()).unwrap();
    eprintln!("{}: {:?} in {:.1?}", cyl.name, out.1, start.elapsed());
    out
}

#[test]
fn lift_over_torus_cylinder_is_parallel_and_lightlike() {
    let cyl = cylinder_torus().unwrap();
    let (ls, rep) = lifted(&cyl, &TORUS_POINT);
    assert!(rep.parallel_residual <= 1e-5, "{rep:?}");
    assert!(rep.current_parallel_residual <= 1e-5, "{rep:?}");
    assert!(rep.norm_residual <= 1e-6, "{rep:?}");
    assert!(rep.decomposition_residual <= 1e-8, "{rep:?}");
    assert!(rep.min_time_component > 0.0);
    assert_eq!(rep.causal_type, CausalType::Lightlike);
    assert_eq!(rep.dist_type, CausalType::Lightlike);
    // V equals P = e^{-2s}(∂_t − H_t⁻¹∂_s).
    for q in [[0.1, 0.1, 1.1, 2.0, 3.1], [-0.2, -0.1, 0.9, 2.1, 2.8]] {
        let v = ls.current(&q).unwrap().v;
        let p = crate::cylinder::p_field(&cyl, &q).unwrap();
        assert!((v - p).amax() < 1e-8);
    }
    let r = ls.slice_identity_residual(&root(&TORUS_POINT)).unwrap();
    assert!(r < 1e-6, "{r:e}");
}

#[test]
fn lift_over_eh_cylinder_is_parallel() {
    let cyl = cylinder_eh().unwrap();
    let (_, rep) = lifted(&cyl, &EH_POINT);
    assert!(rep.parallel_residual <= 1e-5, "{rep:?}");
    assert!(rep.norm_residual <= 1e-6, "{rep:?}");
    assert_eq!(rep.causal_type, CausalType::Lightlike);
}

#[test]
fn lift_of_generic_spinor_is_timelike() {
    // H = Id over the warped torus: any initial value gives a Killing spinor.
    let wp = warped_torus(3, (-0.5, 0.5));
    let cyl = build_cylinder(&wp, &EndomorphismField::identity(4), &CylinderOptions::default()).unwrap();
    let model = wp.model();
    let module = Arc::new(SpinorModule::new(4).unwrap());
    let (field, _) = integrate_codazzi_spinor(
        &model,
        &model_frame(&model).unwrap(),
        module,
        &EndomorphismField::identity(4),
        &root(&TORUS_POINT),
        random_spinor(6, 4),
        Parity::Full,
        &IntegrationOptions::default(),
    )
    .unwrap();
    let (_, rep) = lift_to_cylinder(&cyl, &field, &LiftOptions::default()).unwrap();
    assert!(rep.parallel_residual <= 1e-5, "{rep:?}");
    assert!(rep.norm_residual <= 1e-6, "{rep:?}");
    assert!(rep.min_time_component > 0.0);
    assert_eq!(rep.causal_type, CausalType::Timelike);
    assert_eq!(rep.dist_type, CausalType::Timelike);
}

#[test]
fn lift_rejects_non_codazzi_spinor() {
    let cyl = cylinder_torus().unwrap();
    let wp = cyl.warped.clone().unwrap();
    let ks = construct_warped_killing_spinor(&wp, None, &TORUS_POINT, &KillingOptions::default()).unwrap();
    // Killing spinor of g_wp read against the metric H^*g_wp without Φ_H.
    let bad = SpinorField::new(
        pullback_model(&ks.field.model, &cyl.h),
        ks.field.frame.clone(),
        ks.field.module.clone(),
        ks.field.parity,
        ks.field.anchor.clone(),
        ks.field.values().clone(),
    );
    let r = lift_to_cylinder(&cyl, &bad, &LiftOptions::default());
    assert!(matches!(r, Err(Error::NotCodazzi { .. })), "{r:?}");
}

#[test]
fn slice_identity_holds_for_non_codazzi_spinors() {
    let cyl = cylinder_torus().unwrap();
    let base = pullback_model(&cyl.base, &cyl.h);
    let module = Arc::new(SpinorModule::new(4).unwrap());
    let wp_frame = model_frame(&cyl.base).unwrap();
    let h = cyl.h.clone();
    let frame: crate::geometry::MatrixField = Arc::new(move |p: &[f64]| h.at(p).lu().solve(&wp_frame(p)).unwrap());
    let field = SpinorField::new(
        base,
        frame,
        module,
        Parity::Full,
        root(&TORUS_POINT),
        Arc::new(|p: &[f64]| Ok(CVec::from_fn(4, |i, _| C64::new((p[i] * (i + 1) as f64).sin(), p[0] * 0.3)))),
    );
    let ext = extend_to_cylinder(&cyl, &field).unwrap();
    let r = ext.slice_identity_residual(&[0.1, 1.2, 1.9, 3.1]).unwrap();
    assert!(r < 1e-6, "{r:e}");
}

#[test]
fn ricci_constraint_on_cylinder_bases() {
    let wp = warped_torus(3, (-0.5, 0.5));
    let pts = local_samples(&wp.model(), &root(&TORUS_POINT), 0.3, 3, 2);
    let id = EndomorphismField::identity(4);
    assert!(ricci_constraint_residual(&wp.model(), &id, &pts).unwrap() < 1e-6);
    for cyl in [cylinder_torus().unwrap(), cylinder_eh().unwrap()] {
        let g0 = pullback_model(&cyl.base, &cyl.h);
        let x0: Vec<f64> = if cyl.base.dim == 4 { root(&TORUS_POINT) } else { root(&EH_POINT) };
        let pts = local_samples(&g0, &x0, 0.3, 2, 5);
        let r = ricci_constraint_residual(&g0, &cyl.h.inverse(), &pts).unwrap();
        assert!(r < 1e-4, "{}: {r:e}", cyl.name);
    }
}
