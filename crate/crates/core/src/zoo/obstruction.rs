//! Codazzi tensors and homothetic fields on Eguchi–Hanson, reduced to
//! r-dependent frame components and solved as a linear constraint system
//! on a Chebyshev grid.

use super::eh::EguchiHansonModel;
use crate::error::{Error, Result};
use crate::geometry::frame_connection_table;
use crate::linalg;
use crate::sampling;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::f64::consts::PI;

/// Symmetric 4×4 basis, ordered (00, 01, 02, 03, 11, 12, 13, 22, 23, 33).
pub const SYM_PAIRS: [(usize, usize); 10] = [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

pub fn sym_basis(u: usize) -> DMatrix<f64> {
    let (a, b) = SYM_PAIRS[u];
    let mut m = DMatrix::zeros(4, 4);
    m[(a, b)] = 1.0;
    m[(b, a)] = 1.0;
    m
}

/// Matrices (ω_i)[(k, j)] = ⟨∇_{e_i}e_j, e_k⟩ at radius r, taken from the
/// Koszul formula on the model at fixed reference angles.
pub fn connection_matrices(eh: &EguchiHansonModel, r: f64) -> Result<Vec<DMatrix<f64>>> {
    let p = [r, 1.1, 0.7, 0.4];
    let t = frame_connection_table(&eh.model(), &p)?;
    Ok((0..4).map(|i| DMatrix::from_fn(4, 4, |k, j| t[(i * 4 + j) * 4 + k])).collect())
}

/// Frame pairs in the order (01, 02, 03, 12, 13, 23).
pub const FRAME_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Pointwise coefficients of (∇_{e_i}W)e_j − (∇_{e_j}W)e_i for an
/// r-dependent W: returns (M0, M1), 4 rows each, acting on the 10 symmetric
/// coordinates of W and of W' respectively.
pub fn pair_coefficients(omega: &[DMatrix<f64>], f: f64, pair: (usize, usize)) -> (DMatrix<f64>, DMatrix<f64>) {
    let (i, j) = pair;
    let mut m0 = DMatrix::zeros(4, 10);
    let mut m1 = DMatrix::zeros(4, 10);
    let e = |k: usize| {
        let mut v = DVector::zeros(4);
        v[k] = 1.0;
        v
    };
    for u in 0..10 {
        let w = sym_basis(u);
        let nab = |q: usize| &omega[q] * &w - &w * &omega[q];
        let v0 = nab(i) * e(j) - nab(j) * e(i);
        m0.set_column(u, &v0);
        let mut v1 = DVector::zeros(4);
        if i == 0 {
            v1 += &w * e(j) * f;
        }
        if j == 0 {
            v1 -= &w * e(i) * f;
        }
        m1.set_column(u, &v1);
    }
    (m0, m1)
}

/// Null space of the pointwise constraints of `pairs` at r for W restricted
/// to the column span of `subspace` (10 × m). With `with_derivatives` the
/// unknowns are (w, w') ∈ ℝ^{2m}, otherwise w ∈ ℝ^m and W' is ignored.
pub fn pair_null_space(
    eh: &EguchiHansonModel,
    r: f64,
    subspace: &DMatrix<f64>,
    pairs: &[(usize, usize)],
    with_derivatives: bool,
) -> Result<DMatrix<f64>> {
    let omega = connection_matrices(eh, r)?;
    let f = eh.f(r);
    let m = subspace.ncols();
    let cols = if with_derivatives { 2 * m } else { m };
    let mut a = DMatrix::zeros(4 * pairs.len(), cols);
    for (q, &pair) in pairs.iter().enumerate() {
        let (m0, m1) = pair_coefficients(&omega, f, pair);
        a.view_mut((4 * q, 0), (4, m)).copy_from(&(m0 * subspace));
        if with_derivatives {
            a.view_mut((4 * q, m), (4, m)).copy_from(&(m1 * subspace));
        }
    }
    let scale = a.amax().max(1.0);
    Ok(linalg::null_space(&(a / scale), 1e-6))
}

/// Subspaces of the symmetric coordinates used in the proof steps.
pub mod ansatz {
    use super::*;

    fn from_columns(cols: &[[f64; 10]]) -> DMatrix<f64> {
        DMatrix::from_fn(10, cols.len(), |i, j| cols[j][i])
    }

    /// U-antisymmetric part (U swaps e₁, e₂): coordinates (B, E, G).
    pub fn u_antisymmetric() -> DMatrix<f64> {
        from_columns(&[
            [0., 1., -1., 0., 0., 0., 0., 0., 0., 0.],
            [0., 0., 0., 0., 1., 0., 0., -1., 0., 0.],
            [0., 0., 0., 0., 0., 0., 1., 0., -1., 0.],
        ])
    }

    /// U-symmetric part: coordinates (A, B, D, E, F, G, J).
    pub fn u_symmetric() -> DMatrix<f64> {
        from_columns(&[
            [1., 0., 0., 0., 0., 0., 0., 0., 0., 0.],
            [0., 1., 1., 0., 0., 0., 0., 0., 0., 0.],
            [0., 0., 0., 1., 0., 0., 0., 0., 0., 0.],
            [0., 0., 0., 0., 1., 0., 0., 1., 0., 0.],
            [0., 0., 0., 0., 0., 1., 0., 0., 0., 0.],
            [0., 0., 0., 0., 0., 0., 1., 0., 1., 0.],
            [0., 0., 0., 0., 0., 0., 0., 0., 0., 1.],
        ])
    }

    /// Remaining symmetric shape diag(A, K, K, K) + F(e₁⊗e²+e₂⊗e¹): (A, K, F).
    pub fn a_k_f() -> DMatrix<f64> {
        from_columns(&[
            [1., 0., 0., 0., 0., 0., 0., 0., 0., 0.],
            [0., 0., 0., 0., 1., 0., 0., 1., 0., 1.],
            [0., 0., 0., 0., 0., 1., 0., 0., 0., 0.],
        ])
    }

    /// diag(A, K, K, K): (A, K).
    pub fn a_k() -> DMatrix<f64> {
        from_columns(&[[1., 0., 0., 0., 0., 0., 0., 0., 0., 0.], [0., 0., 0., 0., 1., 0., 0., 1., 0., 1.]])
    }

    /// Only the E coordinate of the U-antisymmetric part.
    pub fn antisymmetric_e() -> DMatrix<f64> {
        from_columns(&[[0., 0., 0., 0., 1., 0., 0., -1., 0., 0.]])
    }
}

/// Chebyshev points x_j = cos(πj/N) mapped to [lo, hi] and the matching
/// differentiation matrix.
pub fn chebyshev(n: usize, lo: f64, hi: f64) -> (Vec<f64>, DMatrix<f64>) {
    let x: Vec<f64> = (0..=n).map(|j| (PI * j as f64 / n as f64).cos()).collect();
    let c = |j: usize| (if j == 0 || j == n { 2.0 } else { 1.0 }) * if j % 2 == 0 { 1.0 } else { -1.0 };
    let mut d = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                d[(i, j)] = c(i) / c(j) / (x[i] - x[j]);
            }
        }
    }
    for i in 0..=n {
        let s: f64 = (0..=n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -s;
    }
    let half = 0.5 * (hi - lo);
    let r = x.iter().map(|t| lo + half * (1.0 + t)).collect();
    (r, d / half)
}

/// Pairs without e₀: for r-dependent W these are purely algebraic.
const ALGEBRAIC_PAIRS: [(usize, usize); 3] = [(1, 2), (1, 3), (2, 3)];

/// Codazzi system after eliminating the algebraic pairs node by node.
///
/// W(r_m) = Σ_j c_j(r_m) b_j(r_m) with b_j spanning the pointwise solution
/// space of the algebraic pairs; the remaining operator acts on the node
/// values of c (column j*(N+1) + m). Columns of coefficients whose
/// derivative enters are measured in the graph norm of d/dr, i.e. the
/// operator is `raw * scaling`.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub nodes: Vec<f64>,
    /// Dimension of the pointwise algebraic solution space.
    pub algebraic_dim: usize,
    pub bases: Vec<DMatrix<f64>>,
    /// Which reduced coefficients appear differentiated.
    pub differentiated: Vec<bool>,
    pub raw: DMatrix<f64>,
    pub scaling: DMatrix<f64>,
}

impl ReducedSystem {
    pub fn operator(&self) -> DMatrix<f64> {
        &self.raw * &self.scaling
    }

    /// Frame components of W at every node from a null vector of
    /// [`ReducedSystem::operator`].
    pub fn reconstruct(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let c = &self.scaling * y;
        let np = self.nodes.len();
        (0..np)
            .map(|m| {
                let k = self.algebraic_dim;
                let coef = DVector::from_iterator(k, (0..k).map(|j| c[j * np + m]));
                let w = &self.bases[m] * coef;
                DMatrix::from_fn(4, 4, |a, b| {
                    let u = SYM_PAIRS.iter().position(|&(x, y)| (x, y) == (a.min(b), a.max(b))).unwrap();
                    w[u]
                })
            })
            .collect()
    }
}

fn algebraic_block(omega: &[DMatrix<f64>], f: f64) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(12, 10);
    for (q, &pair) in ALGEBRAIC_PAIRS.iter().enumerate() {
        a.view_mut((4 * q, 0), (4, 10)).copy_from(&pair_coefficients(omega, f, pair).0);
    }
    a
}

fn rank_nullity(a: &DMatrix<f64>) -> Result<usize> {
    let mut sv = linalg::singular_values_desc(a);
    sv.resize(a.ncols(), 0.0);
    Ok(a.ncols() - linalg::default_rank(&sv)?.rank)
}

/// (I + DᵀD)^{-1/2}.
fn graph_norm_scaling(d: &DMatrix<f64>) -> DMatrix<f64> {
    let n = d.ncols();
    let eig = linalg::symmetrize(&(DMatrix::identity(n, n) + d.transpose() * d)).symmetric_eigen();
    let inv = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    &eig.eigenvectors * inv * eig.eigenvectors.transpose()
}

pub fn reduced_codazzi_system(eh: &EguchiHansonModel, n: usize) -> Result<ReducedSystem> {
    let (r, d) = chebyshev(n, eh.r_range.0, eh.r_range.1);
    let np = n + 1;
    let omegas: Vec<Vec<DMatrix<f64>>> = r.iter().map(|&rm| connection_matrices(eh, rm)).collect::<Result<_>>()?;
    let fs: Vec<f64> = r.iter().map(|&rm| eh.f(rm)).collect();
    let alg: Vec<DMatrix<f64>> = (0..np).map(|m| algebraic_block(&omegas[m], fs[m])).collect();
    let dims: Vec<usize> = alg.iter().map(rank_nullity).collect::<Result<_>>()?;
    let (lo, hi) = (*dims.iter().min().unwrap(), *dims.iter().max().unwrap());
    if lo != hi {
        return Err(Error::GridTooCoarse { coarse: lo, fine: hi });
    }
    let k = lo;
    // Reference basis at the middle node, split into directions whose
    // derivative never enters and the rest.
    let mid = np / 2;
    let nref = linalg::null_space(&(&alg[mid] / alg[mid].amax()), 1e-6);
    let mut m1ref = DMatrix::zeros(12, 10);
    for (q, &j) in [1usize, 2, 3].iter().enumerate() {
        m1ref.view_mut((4 * q, 0), (4, 10)).copy_from(&pair_coefficients(&omegas[mid], fs[mid], (0, j)).1);
    }
    let inner = m1ref * &nref;
    let quiet = linalg::null_space(&(&inner / inner.amax().max(1e-300)), 1e-6);
    let loud = if quiet.ncols() == 0 { DMatrix::identity(k, k) } else { linalg::orthogonal_complement(&quiet) };
    let mut reference = DMatrix::zeros(10, k);
    let mut differentiated = vec![false; k];
    let mut col = 0;
    for j in 0..quiet.ncols() {
        reference.set_column(col, &(&nref * quiet.column(j)));
        col += 1;
    }
    for j in 0..loud.ncols() {
        reference.set_column(col, &(&nref * loud.column(j)));
        differentiated[col] = true;
        col += 1;
    }
    let bases: Vec<DMatrix<f64>> = alg
        .iter()
        .map(|a| {
            let nm = linalg::null_space(&(a / a.amax()), 1e-6);
            &nm * (nm.transpose() * &reference)
        })
        .collect();
    // Node derivatives of the basis.
    let dbases: Vec<DMatrix<f64>> = (0..np)
        .map(|m| {
            let mut acc = DMatrix::zeros(10, k);
            for l in 0..np {
                acc += &bases[l] * d[(m, l)];
            }
            acc
        })
        .collect();
    let mut raw = DMatrix::zeros(24 * np, k * np);
    for m in 0..np {
        for (q, &pair) in FRAME_PAIRS.iter().enumerate() {
            let (m0, m1) = pair_coefficients(&omegas[m], fs[m], pair);
            let row = (m * 6 + q) * 4;
            for j in 0..k {
                let direct = &m0 * bases[m].column(j) + &m1 * dbases[m].column(j);
                let through = &m1 * bases[m].column(j);
                for kk in 0..4 {
                    raw[(row + kk, j * np + m)] += direct[kk];
                    if through[kk] != 0.0 {
                        for l in 0..np {
                            raw[(row + kk, j * np + l)] += through[kk] * d[(m, l)];
                        }
                    }
                }
            }
        }
    }
    let g = graph_norm_scaling(&d);
    let mut scaling = DMatrix::identity(k * np, k * np);
    for j in 0..k {
        if differentiated[j] {
            scaling.view_mut((j * np, j * np), (np, np)).copy_from(&g);
        }
    }
    Ok(ReducedSystem { nodes: r, algebraic_dim: k, bases, differentiated, raw, scaling })
}

/// Operator of ∇_{e_i}V − c e_i = 0 on the node values of the frame
/// components of V (column a*(N+1) + m) and the constant c (last column).
pub fn homothetic_operator(eh: &EguchiHansonModel, n: usize) -> Result<DMatrix<f64>> {
    let (r, d) = chebyshev(n, eh.r_range.0, eh.r_range.1);
    let np = n + 1;
    let mut a = DMatrix::zeros(16 * np, 4 * np + 1);
    for (m, &rm) in r.iter().enumerate() {
        let omega = connection_matrices(eh, rm)?;
        let f = eh.f(rm);
        for i in 0..4 {
            for k in 0..4 {
                let row = (m * 4 + i) * 4 + k;
                for b in 0..4 {
                    a[(row, b * np + m)] += omega[i][(k, b)];
                }
                if i == 0 {
                    for l in 0..np {
                        a[(row, k * np + l)] += f * d[(m, l)];
                    }
                }
                if i == k {
                    a[(row, 4 * np)] = -1.0;
                }
            }
        }
    }
    Ok(a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub name: String,
    /// Dimension of the pointwise solution space.
    pub null_dim: usize,
    /// Largest violation of the stated conclusion over the null basis.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionReport {
    pub grid: usize,
    /// Pointwise solution dimension of the pairs without e₀.
    pub algebraic_dim: usize,
    /// Numerical nullity of the reduced Codazzi operator on the grid.
    pub solution_dim: usize,
    pub solution_dim_refined: usize,
    pub gap_ratio: f64,
    /// Distance of the normalized null vector from Id.
    pub identity_defect: f64,
    pub homothetic_sigma_min: f64,
    pub steps: Vec<StepResult>,
}

impl ObstructionReport {
    /// True when only constant multiples of Id survive and no homothetic
    /// field exists.
    pub fn verdict(&self) -> bool {
        self.solution_dim == 1 && self.solution_dim_refined == 1 && self.identity_defect < 1e-6 && self.homothetic_sigma_min >= 1e-3
    }
}

fn nullity(a: &DMatrix<f64>) -> Result<(usize, f64, DMatrix<f64>)> {
    let svd = a.clone().svd(false, true);
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].partial_cmp(&svd.singular_values[i]).unwrap());
    let sv: Vec<f64> = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let cols = a.ncols();
    let mut full = sv.clone();
    full.resize(cols, 0.0);
    let rank = linalg::default_rank(&full)?;
    let vt = svd.v_t.unwrap();
    let null_rows: Vec<usize> = idx[rank.rank.min(idx.len())..].to_vec();
    let mut basis = DMatrix::zeros(cols, null_rows.len());
    for (c, &i) in null_rows.iter().enumerate() {
        basis.set_column(c, &vt.row(i).transpose());
    }
    Ok((cols - rank.rank, rank.gap_ratio, basis))
}

/// Runs the full constraint solve at `grid` and 2·`grid`, the pointwise
/// proof steps at the interior nodes, and the homothetic system.
pub fn eh_codazzi_obstruction(eh: &EguchiHansonModel, grid: usize) -> Result<ObstructionReport> {
    let sys = reduced_codazzi_system(eh, grid)?;
    let (dim, gap, basis) = nullity(&sys.operator())?;
    let sys2 = reduced_codazzi_system(eh, 2 * grid)?;
    let (dim2, _, _) = nullity(&sys2.operator())?;
    if dim != dim2 {
        return Err(Error::GridTooCoarse { coarse: dim, fine: dim2 });
    }
    let mut identity_defect = f64::INFINITY;
    if dim == 1 {
        let ws = sys.reconstruct(&basis.column(0).into_owned());
        let k = ws[0][(0, 0)];
        identity_defect = ws.iter().map(|w| (w / k - DMatrix::<f64>::identity(4, 4)).amax()).fold(0.0, f64::max);
    }
    let h = homothetic_operator(eh, grid)?;
    let hsv = linalg::singular_values_desc(&h);
    let homothetic_sigma_min = *hsv.last().unwrap();

    let (r, _) = chebyshev(grid, eh.r_range.0, eh.r_range.1);
    let mut steps = vec![
        StepResult { name: "antisymmetric (e1,e2): B = G = 0".into(), null_dim: 0, residual: 0.0 },
        StepResult { name: "antisymmetric (e1,e3): E = 0".into(), null_dim: 0, residual: 0.0 },
        StepResult { name: "symmetric (e1,e2): B = D = G = 0, J = E".into(), null_dim: 0, residual: 0.0 },
        StepResult { name: "symmetric (e1,e3): F = 0".into(), null_dim: 0, residual: 0.0 },
        StepResult { name: "radial (e0,e1),(e0,e3): A = K, K' = 0".into(), null_dim: 0, residual: 0.0 },
    ];
    for &rm in &r[1..grid] {
        let n0 = pair_null_space(eh, rm, &ansatz::u_antisymmetric(), &[(1, 2)], false)?;
        steps[0].null_dim = steps[0].null_dim.max(n0.ncols());
        for c in n0.column_iter() {
            steps[0].residual = steps[0].residual.max(c[0].abs()).max(c[2].abs());
        }
        let n1 = pair_null_space(eh, rm, &ansatz::antisymmetric_e(), &[(1, 3)], false)?;
        steps[1].null_dim = steps[1].null_dim.max(n1.ncols());
        let n2 = pair_null_space(eh, rm, &ansatz::u_symmetric(), &[(1, 2)], false)?;
        steps[2].null_dim = steps[2].null_dim.max(n2.ncols());
        for c in n2.column_iter() {
            // (A, B, D, E, F, G, J)
            steps[2].residual = steps[2].residual.max(c[1].abs()).max(c[2].abs()).max(c[5].abs()).max((c[6] - c[3]).abs());
        }
        let n3 = pair_null_space(eh, rm, &ansatz::a_k_f(), &[(1, 3)], false)?;
        steps[3].null_dim = steps[3].null_dim.max(n3.ncols());
        for c in n3.column_iter() {
            steps[3].residual = steps[3].residual.max(c[2].abs());
        }
        let n4 = pair_null_space(eh, rm, &ansatz::a_k(), &[(0, 1), (0, 3)], true)?;
        // (A, K, A', K'); A' is not constrained by these pairs.
        for c in n4.column_iter() {
            steps[4].residual = steps[4].residual.max((c[0] - c[1]).abs()).max(c[3].abs());
        }
        let ak = n4.rows(0, 2).into_owned();
        let dim_no_adot = if ak.ncols() == 0 { 0 } else { linalg::column_span(&ak, 1e-6).ncols() };
        steps[4].null_dim = steps[4].null_dim.max(dim_no_adot);
    }
    Ok(ObstructionReport {
        grid,
        algebraic_dim: sys.algebraic_dim,
        solution_dim: dim,
        solution_dim_refined: dim2,
        gap_ratio: gap,
        identity_defect,
        homothetic_sigma_min,
        steps,
    })
}

/// Unit quaternion of the Euler angles (θ, φ, ψ).
pub fn euler_quaternion(theta: f64, phi: f64, psi: f64) -> [f64; 4] {
    let (c, s) = ((0.5 * theta).cos(), (0.5 * theta).sin());
    let (a, b) = (0.5 * (phi + psi), 0.5 * (phi - psi));
    [c * a.cos(), s * b.cos(), s * b.sin(), c * a.sin()]
}

/// Frame-component field W(r, q) = Σ c_t(r) M_t q_{a_t}q_{b_t}, smooth on
/// S³/±1, with random coefficients.
#[derive(Debug, Clone)]
pub struct SphereCandidate {
    terms: Vec<(DMatrix<f64>, usize, usize, [f64; 3])>,
}

impl SphereCandidate {
    pub fn random(seed: u64, count: usize) -> Self {
        let mut rng = sampling::rng(seed);
        let terms = (0..count)
            .map(|_| {
                let m = sampling::random_symmetric(&mut rng, 4);
                let a = rng.gen_range(0..4);
                let b = rng.gen_range(0..4);
                let c = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                (m, a, b, c)
            })
            .collect();
        SphereCandidate { terms }
    }

    /// Frame components at the chart point (r, θ, φ, ψ).
    pub fn eval(&self, p: &[f64]) -> DMatrix<f64> {
        let q = euler_quaternion(p[1], p[2], p[3]);
        let r = p[0];
        let mut w = DMatrix::zeros(4, 4);
        for (m, a, b, c) in &self.terms {
            w += m * ((c[0] + c[1] * r + c[2] * r * r) * q[*a] * q[*b]);
        }
        w
    }
}

/// Haar-weighted quadrature over the angles: Gauss–Legendre in θ with
/// weight sin θ, trapezoid in φ, ψ.
fn sphere_nodes(nt: usize, na: usize) -> Vec<([f64; 3], f64)> {
    let (x, w) = gauss_legendre(nt);
    let mut out = Vec::new();
    let mut total = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let th = 0.5 * PI * (xi + 1.0);
        for a in 0..na {
            for b in 0..na {
                let phi = 2.0 * PI * a as f64 / na as f64;
                let psi = 2.0 * PI * b as f64 / na as f64;
                let wt = wi * th.sin();
                total += wt;
                out.push(([th, phi, psi], wt));
            }
        }
    }
    for o in &mut out {
        o.1 /= total;
    }
    out
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Frame components of d^∇W for a frame-component field W(p), 24 entries
/// ordered by [`FRAME_PAIRS`].
pub fn frame_codazzi(eh: &EguchiHansonModel, w: &dyn Fn(&[f64]) -> DMatrix<f64>, p: &[f64]) -> Result<DVector<f64>> {
    let omega = connection_matrices(eh, p[0])?;
    let frame = eh.frame(p);
    let w0 = w(p);
    let mut nab = Vec::with_capacity(4);
    for i in 0..4 {
        let dir = frame.column(i).into_owned();
        let h = 1e-4 / dir.amax().max(1.0);
        let at = |t: f64| {
            let q: Vec<f64> = p.iter().zip(dir.iter()).map(|(x, d)| x + t * d).collect();
            w(&q)
        };
        let d = (at(-2.0 * h) - at(-h) * 8.0 + at(h) * 8.0 - at(2.0 * h)) / (12.0 * h);
        nab.push(d + &omega[i] * &w0 - &w0 * &omega[i]);
    }
    let mut out = DVector::zeros(24);
    for (q, &(i, j)) in FRAME_PAIRS.iter().enumerate() {
        let v = nab[i].column(j) - nab[j].column(i);
        out.rows_mut(4 * q, 4).copy_from(&v);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AveragingCheck {
    /// |avg(avg W) − avg W|.
    pub idempotence: f64,
    /// |avg(d^∇W) − d^∇(avg W)|.
    pub commutation: f64,
    /// Spread of the averaged field over the sphere nodes.
    pub angular_spread: f64,
}

/// Sphere averaging of a random candidate at radius r.
pub fn averaging_check(eh: &EguchiHansonModel, r: f64, seed: u64) -> Result<AveragingCheck> {
    let cand = SphereCandidate::random(seed, 6);
    let nodes = sphere_nodes(12, 8);
    let avg_at = |rr: f64, f: &dyn Fn(&[f64]) -> DMatrix<f64>| {
        let mut acc = DMatrix::zeros(4, 4);
        for (ang, wt) in &nodes {
            acc += f(&[rr, ang[0], ang[1], ang[2]]) * *wt;
        }
        acc
    };
    let w = |p: &[f64]| cand.eval(p);
    let avg = avg_at(r, &w);
    let avg2 = avg_at(r, &|_p: &[f64]| avg.clone());
    let mut lhs = DVector::zeros(24);
    for (ang, wt) in &nodes {
        lhs += frame_codazzi(eh, &w, &[r, ang[0], ang[1], ang[2]])? * *wt;
    }
    let avg_field = |p: &[f64]| avg_at(p[0], &w);
    let rhs = frame_codazzi(eh, &avg_field, &[r, 1.0, 0.5, 0.5])?;
    let mut spread = 0.0_f64;
    for ang in [[0.4, 1.0, 2.0], [2.0, 5.0, 0.3]] {
        spread = spread.max((avg_field(&[r, ang[0], ang[1], ang[2]]) - &avg).amax());
    }
    Ok(AveragingCheck { idempotence: (avg2 - &avg).amax(), commutation: (lhs - rhs).amax(), angular_spread: spread })
}
