use crate::error::{Error, Result};
use crate::geometry::{ManifoldModel, MatrixField};
use crate::linalg;
use crate::sampling;
use nalgebra::DMatrix;
use std::sync::Arc;

/// Point-dependent endomorphism of the tangent spaces, given in chart
/// components (column j = image of ∂_j).
#[derive(Clone)]
pub struct EndomorphismField {
    pub name: String,
    eval: MatrixField,
}

impl std::fmt::Debug for EndomorphismField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "EndomorphismField({})", self.name)
    }
}

impl EndomorphismField {
    pub fn new(name: impl Into<String>, eval: MatrixField) -> Self {
        EndomorphismField { name: name.into(), eval }
    }

    pub fn identity(n: usize) -> Self {
        Self::constant("Id", DMatrix::identity(n, n))
    }

    pub fn constant(name: impl Into<String>, m: DMatrix<f64>) -> Self {
        EndomorphismField::new(name, Arc::new(move |_p: &[f64]| m.clone()))
    }

    pub fn at(&self, p: &[f64]) -> DMatrix<f64> {
        (self.eval)(p)
    }

    pub fn field(&self) -> MatrixField {
        self.eval.clone()
    }

    /// α·self + β·other.
    pub fn combine(&self, alpha: f64, other: &EndomorphismField, beta: f64) -> EndomorphismField {
        let a = self.eval.clone();
        let b = other.eval.clone();
        EndomorphismField::new(
            format!("{alpha}*{} + {beta}*{}", self.name, other.name),
            Arc::new(move |p: &[f64]| a(p) * alpha + b(p) * beta),
        )
    }

    /// self + c·Id.
    pub fn shifted(&self, c: f64) -> EndomorphismField {
        let a = self.eval.clone();
        EndomorphismField::new(
            format!("{} + {c} Id", self.name),
            Arc::new(move |p: &[f64]| {
                let m = a(p);
                let n = m.nrows();
                m + DMatrix::<f64>::identity(n, n) * c
            }),
        )
    }

    /// Pointwise inverse; points where the inverse fails produce NaNs.
    pub fn inverse(&self) -> EndomorphismField {
        let a = self.eval.clone();
        EndomorphismField::new(
            format!("({})^-1", self.name),
            Arc::new(move |p: &[f64]| {
                let m = a(p);
                let n = m.nrows();
                m.try_inverse().unwrap_or_else(|| DMatrix::from_element(n, n, f64::NAN))
            }),
        )
    }

    /// Relative asymmetry of g·A at `p`.
    pub fn asymmetry(&self, model: &ManifoldModel, p: &[f64]) -> f64 {
        let ga = model.metric(p) * self.at(p);
        (&ga - ga.transpose()).amax() / (1.0 + ga.amax())
    }

    /// Eigenvalues of A at `p` (real since A is g-symmetric for a Riemannian g).
    pub fn eigenvalues(&self, model: &ManifoldModel, p: &[f64]) -> Vec<f64> {
        let g = model.metric(p);
        let ga = &g * self.at(p);
        linalg::generalized_sym_eigenvalues(&ga, &g).unwrap_or_else(|| {
            let m = self.at(p);
            m.complex_eigenvalues().iter().map(|c| c.re).collect()
        })
    }

    /// Fails with `AsymmetricField` if the asymmetry exceeds `tol`.
    pub fn check_symmetric(&self, model: &ManifoldModel, p: &[f64], tol: f64) -> Result<()> {
        let a = self.asymmetry(model, p);
        if a > tol {
            Err(Error::AsymmetricField { asymmetry: a })
        } else {
            Ok(())
        }
    }
}

/// Spectral extremes of an endomorphism field over a sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBounds {
    /// Smallest positive eigenvalue, `None` if no positive eigenvalue was seen.
    pub inf_positive: Option<f64>,
    /// Largest negative eigenvalue, `None` if none was seen.
    pub sup_negative: Option<f64>,
    /// Largest positive eigenvalue (μ₊).
    pub sup_positive: Option<f64>,
    /// Most negative eigenvalue (μ₋).
    pub inf_negative: Option<f64>,
    pub global_inf: f64,
    pub global_sup: f64,
    pub sample_count: usize,
}

impl SpectralBounds {
    pub fn from_eigenvalues<'a>(lists: impl IntoIterator<Item = &'a [f64]>) -> SpectralBounds {
        let mut sb = SpectralBounds {
            inf_positive: None,
            sup_negative: None,
            sup_positive: None,
            inf_negative: None,
            global_inf: f64::INFINITY,
            global_sup: f64::NEG_INFINITY,
            sample_count: 0,
        };
        for list in lists {
            sb.sample_count += 1;
            for &l in list {
                sb.global_inf = sb.global_inf.min(l);
                sb.global_sup = sb.global_sup.max(l);
                if l > 0.0 {
                    sb.inf_positive = Some(sb.inf_positive.map_or(l, |x| x.min(l)));
                    sb.sup_positive = Some(sb.sup_positive.map_or(l, |x| x.max(l)));
                } else if l < 0.0 {
                    sb.sup_negative = Some(sb.sup_negative.map_or(l, |x| x.max(l)));
                    sb.inf_negative = Some(sb.inf_negative.map_or(l, |x| x.min(l)));
                }
            }
        }
        sb
    }
}

/// Default scan: lattice with `per_axis` points per axis (capped at 4096
/// points) plus `random` seeded points.
pub fn spectral_bounds(
    model: &ManifoldModel,
    a: &EndomorphismField,
    per_axis: usize,
    random: usize,
    seed: u64,
) -> SpectralBounds {
    let mut pts = sampling::lattice(&model.chart, 0.02, per_axis, 4096);
    let mut rng = sampling::rng(seed);
    pts.extend(sampling::random_points(&mut rng, &model.chart, 0.02, random));
    spectral_bounds_at(model, a, &pts)
}

pub fn spectral_bounds_at(model: &ManifoldModel, a: &EndomorphismField, pts: &[Vec<f64>]) -> SpectralBounds {
    let evs: Vec<Vec<f64>> = pts.iter().map(|p| a.eigenvalues(model, p)).collect();
    SpectralBounds::from_eigenvalues(evs.iter().map(|v| v.as_slice()))
}

/// Frobenius norm of an endomorphism measured in a g-orthonormal basis.
pub fn endo_norm(g: &DMatrix<f64>, m: &DMatrix<f64>) -> f64 {
    match g.clone().cholesky() {
        Some(ch) => {
            let l = ch.l();
            let linv = l.clone().try_inverse().unwrap();
            (l.transpose() * m * linv.transpose()).norm()
        }
        None => m.norm(),
    }
}

/// sqrt|g(v, v)|.
pub fn vec_norm(g: &DMatrix<f64>, v: &nalgebra::DVector<f64>) -> f64 {
    (v.transpose() * g * v)[(0, 0)].abs().sqrt()
}
