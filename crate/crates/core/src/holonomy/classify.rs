//! Invariant subspaces, degeneracy and the block pattern of a holonomy
//! algebra estimate.

use super::estimate::HolonomyEstimate;
use crate::error::Result;
use crate::linalg::{column_span, default_rank, null_space, singular_values_desc, sym_eigenvalues};
use nalgebra::{DMatrix, DVector};

/// Relative residual below which a subspace counts as invariant.
pub const INVARIANCE_TOL: f64 = 1e-6;
/// Relative eigenvalue threshold for the rank of a restricted metric.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Trivial,
    Decomposable,
    WeaklyIrreducible,
    Irreducible,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Trivial => "flat/trivial",
            Verdict::Decomposable => "decomposable",
            Verdict::WeaklyIrreducible => "weakly-irreducible",
            Verdict::Irreducible => "irreducible",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSubspace {
    pub label: String,
    /// Columns spanning the subspace.
    pub basis: DMatrix<f64>,
    /// max over basis elements B of |(I − Π)BV| / |B|.
    pub invariance_residual: f64,
    pub metric_rank: usize,
    pub degenerate: bool,
}

impl InvariantSubspace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn invariant(&self) -> bool {
        self.invariance_residual <= INVARIANCE_TOL
    }
}

/// Basis (P, ÃTF_1, …, ÃTF_k, Q) with the factor dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedFrame {
    pub basis: DMatrix<f64>,
    pub factor_dims: Vec<usize>,
}

impl AdaptedFrame {
    fn factor_columns(&self, i: usize) -> std::ops::Range<usize> {
        let off: usize = 1 + self.factor_dims[..i].iter().sum::<usize>();
        off..off + self.factor_dims[i]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorBlock {
    pub factor: usize,
    /// Rank of the projection onto so(ÃTF_i).
    pub h_rank: usize,
    /// Rank of the projection onto ℝP ∧ ÃTF_i.
    pub m_rank: usize,
    /// Largest P-row entry over the factor columns.
    pub m_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockClassification {
    pub stabilized_vector: Option<DVector<f64>>,
    /// max |BP| / |B| for the candidate P, if given.
    pub p_residual: Option<f64>,
    pub invariant_subspaces: Vec<InvariantSubspace>,
    pub blocks: Vec<FactorBlock>,
    /// Largest entry outside the block pattern (first column, last row,
    /// couplings between different factors), relative to the largest entry.
    pub pattern_residual: Option<f64>,
    pub verdict: Verdict,
}

fn subspace(label: &str, v: DMatrix<f64>, est: &HolonomyEstimate, g: &DMatrix<f64>) -> InvariantSubspace {
    let q = column_span(&v, 1e-10);
    let proj = &q * q.transpose();
    let n = g.nrows();
    let comp = DMatrix::<f64>::identity(n, n) - proj;
    let invariance_residual = est.basis.iter().map(|b| (&comp * b * &q).norm() / b.norm()).fold(0.0, f64::max);
    let restricted = q.transpose() * g * &q;
    let scale = g.norm().max(1e-300);
    let metric_rank = sym_eigenvalues(&restricted).iter().filter(|l| l.abs() > DEGENERACY_TOL * scale).count();
    InvariantSubspace { label: label.to_string(), degenerate: metric_rank < q.ncols(), basis: q, invariance_residual, metric_rank }
}

fn proper(s: &InvariantSubspace, n: usize) -> bool {
    s.dim() > 0 && s.dim() < n
}

/// A non-null vector in the span of `v` (largest |g| eigenvector of the
/// restricted metric), if any.
fn non_null_line(v: &DMatrix<f64>, g: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if v.ncols() == 0 {
        return None;
    }
    let r = crate::linalg::symmetrize(&(v.transpose() * g * v));
    let eig = r.symmetric_eigen();
    let (k, l) = eig.eigenvalues.iter().enumerate().max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())?;
    if l.abs() <= DEGENERACY_TOL * g.norm() {
        return None;
    }
    Some(DMatrix::from_column_slice(v.nrows(), 1, (v * eig.eigenvectors.column(k)).as_slice()))
}

/// Classifies the estimated representation. `p` is a candidate null vector
/// to test for stabilization; `adapted` adds the coordinate blocks of an
/// adapted basis to the candidate subspaces and reports h_i, m_i.
pub fn classify_blocks(est: &HolonomyEstimate, g: &DMatrix<f64>, p: Option<&DVector<f64>>, adapted: Option<&AdaptedFrame>) -> Result<BlockClassification> {
    let n = g.nrows();
    let p_residual = p.map(|p| est.basis.iter().map(|b| (b * p).norm() / (b.norm() * p.norm())).fold(0.0, f64::max));
    let stabilized_vector = match (p, p_residual) {
        (Some(p), Some(r)) if r <= INVARIANCE_TOL => Some(p.clone()),
        _ => None,
    };
    if est.dimension == 0 {
        return Ok(BlockClassification {
            stabilized_vector,
            p_residual,
            invariant_subspaces: Vec::new(),
            blocks: Vec::new(),
            pattern_residual: None,
            verdict: Verdict::Trivial,
        });
    }
    let mut subs = Vec::new();
    let stacked = DMatrix::from_fn(n * est.basis.len(), n, |r, c| est.basis[r / n][(r % n, c)]);
    let kernel = null_space(&stacked, 1e-6);
    if kernel.ncols() > 0 {
        if let Some(line) = non_null_line(&kernel, g) {
            subs.push(subspace("non-null line in common kernel", line, est, g));
        }
        subs.push(subspace("common kernel", kernel.clone(), est, g));
        subs.push(subspace("orthogonal of common kernel", null_space(&(kernel.transpose() * g), 1e-8), est, g));
    }
    let images = DMatrix::from_fn(n, n * est.basis.len(), |r, c| est.basis[c / n][(r, c % n)]);
    let image = column_span(&images, 1e-6);
    if image.ncols() < n {
        subs.push(subspace("image", image.clone(), est, g));
        subs.push(subspace("orthogonal of image", null_space(&(image.transpose() * g), 1e-8), est, g));
    }
    let mut blocks = Vec::new();
    let mut pattern_residual = None;
    if let Some(frame) = adapted {
        let e = &frame.basis;
        let einv = e.clone().try_inverse().ok_or(crate::Error::SingularA { condition: f64::INFINITY })?;
        subs.push(subspace("P", e.columns(0, 1).into_owned(), est, g));
        for i in 0..frame.factor_dims.len() {
            let cols = frame.factor_columns(i);
            subs.push(subspace(&format!("factor {i}"), e.columns(cols.start, cols.len()).into_owned(), est, g));
            subs.push(subspace(&format!("P + factor {i}"), DMatrix::from_columns(&[e.column(0)].into_iter().chain((cols.clone()).map(|c| e.column(c))).collect::<Vec<_>>()), est, g));
        }
        let adapted_basis: Vec<DMatrix<f64>> = est.basis.iter().map(|b| &einv * b * e).collect();
        let biggest = adapted_basis.iter().map(|b| b.amax()).fold(0.0, f64::max);
        let mut off = 0.0_f64;
        for b in &adapted_basis {
            off = off.max(b.column(0).amax()).max(b.row(n - 1).amax());
            for i in 0..frame.factor_dims.len() {
                for j in 0..frame.factor_dims.len() {
                    if i != j {
                        let (ri, cj) = (frame.factor_columns(i), frame.factor_columns(j));
                        off = off.max(b.view((ri.start, cj.start), (ri.len(), cj.len())).amax());
                    }
                }
            }
        }
        pattern_residual = Some(off / biggest);
        for i in 0..frame.factor_dims.len() {
            let c = frame.factor_columns(i);
            let hs: Vec<DVector<f64>> =
                adapted_basis.iter().map(|b| DVector::from_column_slice(b.view((c.start, c.start), (c.len(), c.len())).clone_owned().as_slice())).collect();
            let ms: Vec<DVector<f64>> = adapted_basis.iter().map(|b| DVector::from_iterator(c.len(), b.view((0, c.start), (1, c.len())).iter().cloned())).collect();
            let h_rank = default_rank(&singular_values_desc(&DMatrix::from_columns(&hs)))?.rank;
            let m_rank = default_rank(&singular_values_desc(&DMatrix::from_columns(&ms)))?.rank;
            let m_norm = ms.iter().map(|m| m.amax()).fold(0.0, f64::max);
            blocks.push(FactorBlock { factor: i, h_rank, m_rank, m_norm });
        }
    }
    let decomposable = subs.iter().any(|s| proper(s, n) && s.invariant() && !s.degenerate);
    let degenerate = subs.iter().any(|s| proper(s, n) && s.invariant() && s.degenerate);
    let verdict = if decomposable {
        Verdict::Decomposable
    } else if degenerate {
        Verdict::WeaklyIrreducible
    } else {
        Verdict::Irreducible
    };
    Ok(BlockClassification { stabilized_vector, p_residual, invariant_subspaces: subs, blocks, pattern_residual, verdict })
}
