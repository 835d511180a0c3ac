use crate::geometry::{
    central_difference_scalar, christoffel, constant_metric, ChartBox, FrameField, ManifoldModel, MatrixField, Signature,
};
use crate::warped::{EndomorphismField, ScalarField, WarpedProductModel};
use crate::Result;
use nalgebra::DMatrix;
use std::f64::consts::PI;
use std::sync::Arc;

fn identity_frame(n: usize) -> FrameField {
    FrameField::new(Arc::new(move |_p: &[f64]| DMatrix::identity(n, n))).with_commutators(Arc::new(move |_p: &[f64]| vec![0.0; n * n * n]))
}

/// Euclidean ℝⁿ on the box [−half, half]ⁿ.
pub fn flat(n: usize, half: f64) -> ManifoldModel {
    ManifoldModel::new("flat", ChartBox::new(vec![-half; n], vec![half; n]), Signature::riemannian(n), constant_metric(DMatrix::identity(n, n)))
        .with_derivatives(Arc::new(move |_p: &[f64]| vec![DMatrix::zeros(n, n); n]))
        .with_frame(identity_frame(n))
}

/// Flat torus ℝⁿ/2πℤⁿ on one fundamental box.
pub fn flat_torus(n: usize) -> ManifoldModel {
    flat(n, PI).with_chart(ChartBox::new(vec![0.0; n], vec![2.0 * PI; n])).with_name("flat-torus")
}

/// Unit round 2-sphere in (θ, φ), θ kept `margin` away from the poles.
pub fn round_sphere(margin: f64) -> ManifoldModel {
    ManifoldModel::new(
        "round-sphere",
        ChartBox::new(vec![margin, 0.0], vec![PI - margin, 2.0 * PI]),
        Signature::riemannian(2),
        Arc::new(|p: &[f64]| DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, p[0].sin().powi(2)]))),
    )
    .with_derivatives(Arc::new(|p: &[f64]| {
        let mut d0 = DMatrix::zeros(2, 2);
        d0[(1, 1)] = 2.0 * p[0].sin() * p[0].cos();
        vec![d0, DMatrix::zeros(2, 2)]
    }))
    .with_frame(
        FrameField::new(Arc::new(|p: &[f64]| DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0 / p[0].sin()]))))
            .with_commutators(Arc::new(|p: &[f64]| {
                // [∂_θ, (sin θ)⁻¹∂_φ] = −cot θ e_1
                let c = -p[0].cos() / p[0].sin();
                let mut out = vec![0.0; 8];
                out[3] = c;
                out[5] = -c;
                out
            })),
    )
}

/// Hessian of `h` on flat ℝᵏ, by nested fourth-order differences with
/// step `step` (exact up to rounding for polynomials of degree ≤ 4).
pub fn flat_hessian_codazzi(k: usize, h: ScalarField, step: f64) -> EndomorphismField {
    let field: MatrixField = Arc::new(move |p: &[f64]| {
        let mut m = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let hh = h.clone();
                let v = central_difference_scalar(|q| central_difference_scalar(|w| hh(w), q, j, step), p, i, step);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    });
    EndomorphismField::new("hess", field)
}

/// Cone dr² + r²g_N over a link N.
#[derive(Debug, Clone)]
pub struct ConeModel {
    pub link: ManifoldModel,
    pub r_range: (f64, f64),
}

impl ConeModel {
    pub fn new(link: ManifoldModel, r_range: (f64, f64)) -> Self {
        assert!(0.0 < r_range.0 && r_range.0 < r_range.1);
        ConeModel { link, r_range }
    }

    pub fn dim(&self) -> usize {
        self.link.dim + 1
    }

    pub fn model(&self) -> ManifoldModel {
        let n = self.dim();
        let mut lo = vec![self.r_range.0];
        lo.extend(&self.link.chart.lo);
        let mut hi = vec![self.r_range.1];
        hi.extend(&self.link.chart.hi);
        let link = self.link.clone();
        let metric = {
            let link = link.clone();
            Arc::new(move |p: &[f64]| {
                let mut g = DMatrix::zeros(n, n);
                g[(0, 0)] = 1.0;
                g.view_mut((1, 1), (n - 1, n - 1)).copy_from(&(link.metric(&p[1..]) * (p[0] * p[0])));
                g
            })
        };
        let derivs = Arc::new(move |p: &[f64]| {
            let r = p[0];
            let x = &p[1..];
            let mut out = Vec::with_capacity(n);
            let mut d0 = DMatrix::zeros(n, n);
            d0.view_mut((1, 1), (n - 1, n - 1)).copy_from(&(link.metric(x) * (2.0 * r)));
            out.push(d0);
            for dk in link.metric_derivatives(x) {
                let mut d = DMatrix::zeros(n, n);
                d.view_mut((1, 1), (n - 1, n - 1)).copy_from(&(dk * (r * r)));
                out.push(d);
            }
            out
        });
        let mut scale = vec![1.0];
        scale.extend(&self.link.fd.scale);
        ManifoldModel::new(format!("cone({})", self.link.name), ChartBox::new(lo, hi), Signature::riemannian(n), metric)
            .with_derivatives(derivs)
            .with_fd_scale(scale)
    }
}

/// T = ∇∂_r on the cone, read off the Christoffel symbols: T^k_j = Γ^k_{j r}.
pub fn cone_codazzi(cone: &ConeModel) -> EndomorphismField {
    let m = cone.model();
    let n = m.dim;
    EndomorphismField::new(
        "nabla dr",
        Arc::new(move |p: &[f64]| match christoffel(&m, p) {
            Ok(g) => DMatrix::from_fn(n, n, |k, j| g.get(k, j, 0)),
            Err(_) => DMatrix::from_element(n, n, f64::NAN),
        }),
    )
}

/// Riemannian product of the factors with T = Σ λ_i Id_{F_i}.
pub fn product_model(factors: &[ManifoldModel], lambdas: &[f64]) -> Result<(ManifoldModel, EndomorphismField)> {
    if factors.is_empty() || factors.len() != lambdas.len() {
        return Err(crate::Error::FixtureError("product needs one weight per factor and at least one factor".into()));
    }
    let dims: Vec<usize> = factors.iter().map(|f| f.dim).collect();
    let offs: Vec<usize> = dims.iter().scan(0, |acc, d| {
        let o = *acc;
        *acc += d;
        Some(o)
    }).collect();
    let n: usize = dims.iter().sum();
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    let mut scale = Vec::new();
    for f in factors {
        lo.extend(&f.chart.lo);
        hi.extend(&f.chart.hi);
        scale.extend(&f.fd.scale);
    }
    let fs: Vec<ManifoldModel> = factors.to_vec();
    let block = {
        let fs = fs.clone();
        let offs = offs.clone();
        let dims = dims.clone();
        move |p: &[f64], get: &dyn Fn(&ManifoldModel, &[f64]) -> DMatrix<f64>| {
            let mut g = DMatrix::zeros(n, n);
            for (i, f) in fs.iter().enumerate() {
                let x = &p[offs[i]..offs[i] + dims[i]];
                g.view_mut((offs[i], offs[i]), (dims[i], dims[i])).copy_from(&get(f, x));
            }
            g
        }
    };
    let block = Arc::new(block);
    let metric = {
        let block = block.clone();
        Arc::new(move |p: &[f64]| block(p, &|f, x| f.metric(x)))
    };
    let derivs = {
        let fs = fs.clone();
        let offs = offs.clone();
        let dims = dims.clone();
        Arc::new(move |p: &[f64]| {
            let mut out = vec![DMatrix::zeros(n, n); n];
            for (i, f) in fs.iter().enumerate() {
                let x = &p[offs[i]..offs[i] + dims[i]];
                for (k, dk) in f.metric_derivatives(x).into_iter().enumerate() {
                    out[offs[i] + k].view_mut((offs[i], offs[i]), (dims[i], dims[i])).copy_from(&dk);
                }
            }
            out
        })
    };
    let name = factors.iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join(" x ");
    let mut model = ManifoldModel::new(name, ChartBox::new(lo, hi), Signature::riemannian(n), metric)
        .with_derivatives(derivs)
        .with_fd_scale(scale);
    if factors.iter().all(|f| f.frame().is_some()) {
        let vectors = {
            let block = block.clone();
            Arc::new(move |p: &[f64]| block(p, &|f, x| f.frame_at(x).unwrap()))
        };
        let mut frame = FrameField::new(vectors);
        if factors.iter().all(|f| f.frame().unwrap().commutators.is_some()) {
            let fs = fs.clone();
            let offs = offs.clone();
            let dims = dims.clone();
            frame = frame.with_commutators(Arc::new(move |p: &[f64]| {
                let mut c = vec![0.0; n * n * n];
                for (q, f) in fs.iter().enumerate() {
                    let (o, d) = (offs[q], dims[q]);
                    let cf = (f.frame().unwrap().commutators.as_ref().unwrap())(&p[o..o + d]);
                    for i in 0..d {
                        for j in 0..d {
                            for k in 0..d {
                                c[((o + i) * n + o + j) * n + o + k] = cf[(i * d + j) * d + k];
                            }
                        }
                    }
                }
                c
            }));
        }
        model = model.with_frame(frame);
    }
    let mut t = DMatrix::zeros(n, n);
    for (i, l) in lambdas.iter().enumerate() {
        for k in 0..dims[i] {
            t[(offs[i] + k, offs[i] + k)] = *l;
        }
    }
    Ok((model, EndomorphismField::constant(format!("sum lambda_i Id ({lambdas:?})"), t)))
}

/// ℝ ×_{e^{-2s}} F over a flat n-torus.
pub fn warped_torus(n: usize, s_range: (f64, f64)) -> WarpedProductModel {
    WarpedProductModel::standard(flat_torus(n), s_range)
}

/// ℝ ×_{e^{-2s}} EH.
pub fn warped_eh(eh: &super::EguchiHansonModel, s_range: (f64, f64)) -> WarpedProductModel {
    WarpedProductModel::standard(eh.model(), s_range)
}
