//! Dense linear-algebra helpers shared by every module: symmetric and
//! generalized eigenvalues, numerical rank with a gap test, subspace
//! utilities and the real matrix logarithm.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Relative singular-value threshold used for every rank decision.
pub const RANK_REL_TOL: f64 = 1e-5;
/// Minimum ratio between the last kept and first dropped singular value.
pub const RANK_GAP_MIN: f64 = 10.0;
/// Absolute floor below which a whole spectrum counts as zero.
pub const RANK_ABS_FLOOR: f64 = 1e-8;

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let s = symmetrize(m);
    let mut ev: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues of the pencil (a, b) with `b` symmetric positive definite, ascending.
pub fn generalized_sym_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<Vec<f64>> {
    let chol = symmetrize(b).cholesky()?;
    let l = chol.l();
    let linv = l.clone().try_inverse()?;
    let c = &linv * symmetrize(a) * linv.transpose();
    Some(sym_eigenvalues(&c))
}

/// 2-norm condition number; infinite for singular input.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Singular values sorted descending.
pub fn singular_values_desc(m: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Rank decision on a descending singular-value list.
#[derive(Debug, Clone, PartialEq)]
pub struct RankDecision {
    pub rank: usize,
    /// Ratio s_rank-1 / s_rank; infinite when nothing was dropped or kept.
    pub gap_ratio: f64,
}

/// Counts singular values above `rel * s_max` (and above `abs_floor`).
/// Fails with `AmbiguousRank` when the kept/dropped gap is below `gap_min`.
pub fn numerical_rank(sv: &[f64], rel: f64, abs_floor: f64, gap_min: f64) -> Result<RankDecision> {
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax <= abs_floor {
        return Ok(RankDecision { rank: 0, gap_ratio: f64::INFINITY });
    }
    let thr = (rel * smax).max(abs_floor);
    let rank = sv.iter().filter(|&&s| s > thr).count();
    let gap_ratio = if rank == sv.len() || sv[rank] <= 0.0 {
        f64::INFINITY
    } else {
        sv[rank - 1] / sv[rank]
    };
    if gap_ratio < gap_min {
        return Err(Error::AmbiguousRank { gap_ratio });
    }
    Ok(RankDecision { rank, gap_ratio })
}

/// Rank with the crate-wide default thresholds.
pub fn default_rank(sv: &[f64]) -> Result<RankDecision> {
    numerical_rank(sv, RANK_REL_TOL, RANK_ABS_FLOOR, RANK_GAP_MIN)
}

/// Orthonormal basis (columns) of the null space of `m`, using the default
/// relative threshold on singular values.
pub fn null_space(m: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    let n = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    // Use the Gram matrix so a full set of right singular vectors is available.
    let gram = m.transpose() * m;
    let eig = symmetrize(&gram).symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let thr = (rel * rel * max).max(1e-300);
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&i| eig.eigenvalues[i] <= thr)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis of the column span of `m` with a relative threshold.
pub fn column_span(m: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    let n = m.nrows();
    if m.ncols() == 0 {
        return DMatrix::zeros(n, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.unwrap();
    let max = svd.singular_values.max();
    if max <= 0.0 {
        return DMatrix::zeros(n, 0);
    }
    let cols: Vec<DVector<f64>> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rel * max)
        .map(|i| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal complement of an orthonormal column basis.
pub fn orthogonal_complement(basis: &DMatrix<f64>) -> DMatrix<f64> {
    null_space(&basis.transpose(), 1e-10)
}

/// Flattens each matrix row-major into a column of the returned matrix.
pub fn stack_flattened(mats: &[DMatrix<f64>]) -> DMatrix<f64> {
    if mats.is_empty() {
        return DMatrix::zeros(0, 0);
    }
    let len = mats[0].nrows() * mats[0].ncols();
    let mut out = DMatrix::zeros(len, mats.len());
    for (c, m) in mats.iter().enumerate() {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out[(i * m.ncols() + j, c)] = m[(i, j)];
            }
        }
    }
    out
}

/// Principal logarithm of a real matrix close to the identity by inverse
/// scaling and squaring: square roots (Denman-Beavers) until the matrix is
/// within 0.25 of the identity, then a 6-node Gauss-Legendre evaluation of
/// log(I + X) = ∫₀¹ X (I + tX)⁻¹ dt, which equals the [6/6] Padé approximant.
pub fn matrix_log(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let dist = (m - &id).norm();
    if dist >= 1.0 {
        return Err(Error::LogDivergence { distance: dist });
    }
    let mut a = m.clone();
    let mut k = 0u32;
    while (&a - &id).norm() > 0.25 && k < 40 {
        a = sqrtm_denman_beavers(&a)?;
        k += 1;
    }
    let x = &a - &id;
    let mut acc = DMatrix::<f64>::zeros(n, n);
    for (node, weight) in GAUSS_LEGENDRE_6 {
        let t = 0.5 * (1.0 + node);
        let w = 0.5 * weight;
        let inv = (&id + &x * t)
            .try_inverse()
            .ok_or(Error::LogDivergence { distance: dist })?;
        acc += (&x * inv) * w;
    }
    Ok(acc * 2f64.powi(k as i32))
}

const GAUSS_LEGENDRE_6: [(f64, f64); 6] = [
    (-0.932_469_514_203_152_1, 0.171_324_492_379_170_4),
    (-0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
    (-0.238_619_186_083_196_9, 0.467_913_934_572_691_0),
    (0.238_619_186_083_196_9, 0.467_913_934_572_691_0),
    (0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
    (0.932_469_514_203_152_1, 0.171_324_492_379_170_4),
];

/// Principal square root via the Denman-Beavers iteration.
pub fn sqrtm_denman_beavers(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::<f64>::identity(n, n);
    for _ in 0..60 {
        let yi = y.clone().try_inverse().ok_or(Error::LogDivergence { distance: f64::INFINITY })?;
        let zi = z.clone().try_inverse().ok_or(Error::LogDivergence { distance: f64::INFINITY })?;
        let y_next = (&y + zi) * 0.5;
        let z_next = (&z + yi) * 0.5;
        let delta = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * y.norm().max(1.0) {
            break;
        }
    }
    Ok(y)
}

/// Matrix exponential by scaling and squaring with a Taylor core; used only
/// as an independent oracle for the logarithm and for small generators.
pub fn matrix_exp(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let norm = m.norm();
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let a = m / 2f64.powi(s);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..20 {
        term = &term * &a / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Largest principal angle sine between two subspaces given by orthonormal
/// column bases; 1 if the dimensions differ.
pub fn subspace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let proj = b * b.transpose();
    let resid = a - &proj * a;
    resid.clone().singular_values().max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn log_of_rotation() {
        let th = 0.3_f64;
        let r = DMatrix::from_row_slice(2, 2, &[th.cos(), -th.sin(), th.sin(), th.cos()]);
        let l = matrix_log(&r).unwrap();
        assert!((l[(1, 0)] - th).abs() < 1e-14);
        assert!((l[(0, 1)] + th).abs() < 1e-14);
        assert!(l[(0, 0)].abs() < 1e-14);
    }

    #[test]
    fn log_far_from_identity_rejected() {
        let m = DMatrix::<f64>::identity(3, 3) * 3.0;
        assert!(matches!(matrix_log(&m), Err(Error::LogDivergence { .. })));
    }

    #[test]
    fn generalized_eigenvalues_match_scaled_identity() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 6.0]));
        let b = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0]));
        let ev = generalized_sym_eigenvalues(&a, &b).unwrap();
        assert!((ev[0] - 2.0).abs() < 1e-14 && (ev[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rank_with_gap() {
        let d = numerical_rank(&[1.0, 0.5, 1e-9], RANK_REL_TOL, RANK_ABS_FLOOR, RANK_GAP_MIN).unwrap();
        assert_eq!(d.rank, 2);
        let amb = numerical_rank(&[1.0, 2e-5, 8e-6], RANK_REL_TOL, RANK_ABS_FLOOR, RANK_GAP_MIN);
        assert!(matches!(amb, Err(Error::AmbiguousRank { .. })));
        let zero = numerical_rank(&[1e-12, 1e-13], RANK_REL_TOL, RANK_ABS_FLOOR, RANK_GAP_MIN).unwrap();
        assert_eq!(zero.rank, 0);
    }

    #[test]
    fn null_space_of_rank_one() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let ns = null_space(&m, 1e-10);
        assert_eq!(ns.ncols(), 2);
        assert!((&m * &ns).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn log_inverts_exp(entries in proptest::collection::vec(-0.3f64..0.3, 16)) {
            let x = DMatrix::from_row_slice(4, 4, &entries);
            let e = matrix_exp(&x);
            prop_assume!((&e - DMatrix::<f64>::identity(4, 4)).norm() < 0.9);
            let l = matrix_log(&e).unwrap();
            prop_assert!((l - x).norm() < 1e-11);
        }
    }
}
