//! Cylinder fixtures C[F;H] over the standard warped product ℝ ×_{e^{-2s}} F.

use super::{flat_torus, product_model, warped_eh, EguchiHansonModel};
use crate::cylinder::{build_cylinder, CylinderModel, CylinderOptions};
use crate::geometry::MatrixField;
use crate::warped::{constant_b_split, EndomorphismField, WarpedProductModel};
use crate::Result;
use nalgebra::DMatrix;
use std::sync::Arc;

pub const CYLINDER_S_RANGE: (f64, f64) = (-0.5, 0.5);

/// T = 2·Id + Hess φ on the flat n-torus (n ≥ 2), with
/// φ = 0.2 Σ_i cos x_i cos x_{i+1} + 0.1 sin(x_0 + x_{n−1}).
pub fn torus_codazzi(n: usize) -> EndomorphismField {
    assert!(n >= 2);
    let field: MatrixField = Arc::new(move |x: &[f64]| {
        let mut h = DMatrix::<f64>::identity(n, n) * 2.0;
        for a in 0..n {
            let b = (a + 1) % n;
            if n == 2 && a == 1 {
                break;
            }
            let (ca, sa) = (x[a].cos(), x[a].sin());
            let (cb, sb) = (x[b].cos(), x[b].sin());
            h[(a, a)] -= 0.2 * ca * cb;
            h[(b, b)] -= 0.2 * ca * cb;
            h[(a, b)] += 0.2 * sa * sb;
            h[(b, a)] += 0.2 * sa * sb;
        }
        let (a, b) = (0, n - 1);
        let v = -0.1 * (x[a] + x[b]).sin();
        h[(a, a)] += v;
        h[(b, b)] += v;
        h[(a, b)] += v;
        h[(b, a)] += v;
        h
    });
    EndomorphismField::new("2Id + hess(phi)", field)
}

fn cylinder(wp: WarpedProductModel, t: &EndomorphismField, beta: f64, name: &str) -> Result<CylinderModel> {
    let h = constant_b_split(&wp, t, beta).assemble(&wp);
    let mut c = build_cylinder(&wp, &h, &CylinderOptions::default())?;
    c.name = name.to_string();
    Ok(c)
}

/// H = Id over the warped flat 3-torus.
pub fn cylinder_torus_identity() -> Result<CylinderModel> {
    let wp = WarpedProductModel::standard(flat_torus(3), CYLINDER_S_RANGE);
    let mut c = build_cylinder(&wp, &EndomorphismField::identity(4), &CylinderOptions::default())?;
    c.name = "cylinder-torus-id".into();
    Ok(c)
}

/// H(1, 0, E) from the non-constant [`torus_codazzi`] on the flat 3-torus.
pub fn cylinder_torus() -> Result<CylinderModel> {
    let wp = WarpedProductModel::standard(flat_torus(3), CYLINDER_S_RANGE);
    cylinder(wp, &torus_codazzi(3), 1.0, "cylinder-torus")
}

/// H(1, 0, E) from T = 2·Id on Eguchi–Hanson (a = 1).
pub fn cylinder_eh() -> Result<CylinderModel> {
    let wp = warped_eh(&EguchiHansonModel::new(1.0), CYLINDER_S_RANGE);
    cylinder(wp, &EndomorphismField::constant("2Id", DMatrix::identity(4, 4) * 2.0), 1.0, "cylinder-eh")
}

/// Fiber S¹ × EH with T = 2·Id_{S¹} + 3·Id_{EH}.
pub fn cylinder_product() -> Result<CylinderModel> {
    let (fiber, t) = product_model(&[flat_torus(1), EguchiHansonModel::new(1.0).model()], &[2.0, 3.0])?;
    let wp = WarpedProductModel::standard(fiber, CYLINDER_S_RANGE);
    cylinder(wp, &t, 1.0, "cylinder-product")
}
