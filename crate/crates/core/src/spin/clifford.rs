//! Complex Clifford modules for Cl_{p,q} and the Euclidean action κ on
//! Δ_{1,n}.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const MAX_CLIFFORD_DIM: usize = 8;
/// Tolerance for the asserted Clifford relations.
pub const RELATION_TOL: f64 = 1e-12;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

fn pauli() -> [CMat; 4] {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    [
        CMat::from_row_slice(2, 2, &[o, z, z, o]),
        CMat::from_row_slice(2, 2, &[z, o, o, z]),
        CMat::from_row_slice(2, 2, &[z, -I, I, z]),
        CMat::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    CMat::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

fn kron_all(fs: &[&CMat]) -> CMat {
    fs.iter().fold(CMat::identity(1, 1), |acc, f| kron(&acc, f))
}

/// `count` pairwise anticommuting Hermitian matrices squaring to 1, of size
/// 2^⌊count/2⌋.
pub fn hermitian_generators(count: usize) -> Vec<CMat> {
    let [id, s1, s2, s3] = pauli();
    let m = count / 2;
    let mut out = Vec::with_capacity(count);
    for k in 0..m {
        for s in [&s1, &s2] {
            let mut fs: Vec<&CMat> = vec![&s3; k];
            fs.push(s);
            fs.extend(std::iter::repeat(&id).take(m - k - 1));
            out.push(kron_all(&fs));
        }
    }
    if count % 2 == 1 {
        out.push(kron_all(&vec![&s3; m]));
    }
    out
}

/// Complex representation of Cl_{p,q}: p timelike generators first with
/// γ_a² = +1, then q spacelike ones with γ_a² = −1, so that
/// γ_aγ_b + γ_bγ_a = −2η_ab with η = diag(−1,…,−1, +1,…,+1).
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordRep {
    pub p: usize,
    pub q: usize,
    pub gammas: Vec<CMat>,
    pub eta: Vec<f64>,
    pub module_dim: usize,
}

pub fn clifford_rep(p: usize, q: usize) -> Result<CliffordRep> {
    let n = p + q;
    if n > MAX_CLIFFORD_DIM {
        return Err(Error::DimTooLarge { dim: n });
    }
    let gammas: Vec<CMat> =
        hermitian_generators(n).into_iter().enumerate().map(|(a, g)| if a < p { g } else { g * I }).collect();
    let eta = (0..n).map(|a| if a < p { -1.0 } else { 1.0 }).collect();
    let module_dim = 1 << (n / 2);
    let rep = CliffordRep { p, q, gammas, eta, module_dim };
    let r = rep.relation_residual();
    assert!(r <= RELATION_TOL, "Clifford relations violated by {r:e}");
    Ok(rep)
}

impl CliffordRep {
    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    pub fn identity(&self) -> CMat {
        CMat::identity(self.module_dim, self.module_dim)
    }

    /// max over a, b of |γ_aγ_b + γ_bγ_a + 2η_ab|.
    pub fn relation_residual(&self) -> f64 {
        let id = self.identity();
        let mut worst = 0.0_f64;
        for (a, ga) in self.gammas.iter().enumerate() {
            for (b, gb) in self.gammas.iter().enumerate() {
                let mut m = ga * gb + gb * ga;
                if a == b {
                    m += &id * C64::new(2.0 * self.eta[a], 0.0);
                }
                worst = worst.max(m.iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// Clifford multiplication x• by a vector with components in the
    /// generator basis.
    pub fn mult(&self, x: &[f64]) -> CMat {
        let mut out = CMat::zeros(self.module_dim, self.module_dim);
        for (g, &xa) in self.gammas.iter().zip(x) {
            if xa != 0.0 {
                out += g * C64::new(xa, 0.0);
            }
        }
        out
    }

    /// ⟨u, v⟩₀ = Σ u_i v̄_i, linear in the first slot.
    pub fn inner0(&self, u: &CVec, v: &CVec) -> C64 {
        v.dotc(u)
    }

    /// ⟨u, v⟩₁ = ⟨e₀•u, v⟩₀; needs a timelike generator.
    pub fn inner1(&self, u: &CVec, v: &CVec) -> C64 {
        assert!(self.p >= 1, "⟨·,·⟩₁ needs a timelike generator");
        self.inner0(&(&self.gammas[0] * u), v)
    }

    /// Product of all generators, scaled by 1 or i so that it squares to 1.
    pub fn volume_element(&self) -> CMat {
        volume_of(&self.gammas, self.module_dim)
    }
}

fn volume_of(gs: &[CMat], dim: usize) -> CMat {
    let prod = gs.iter().fold(CMat::identity(dim, dim), |acc, g| acc * g);
    let sq = &prod * &prod;
    if sq[(0, 0)].re > 0.0 {
        prod
    } else {
        prod * I
    }
}

/// Parity of a spinor field on an odd-dimensional Riemannian manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Plus,
    Minus,
    Full,
}

impl Parity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Plus => "plus",
            Parity::Minus => "minus",
            Parity::Full => "full",
        }
    }
}

/// Spinor module Δ_{1,n} of Cl_{1,n} together with κ(x) = iγ₀γ_x, which
/// realizes the Euclidean Clifford action x⋆ of ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorModule {
    pub rep: CliffordRep,
    /// κ_j = iγ₀γ_{j+1}, j = 0..n.
    pub kappas: Vec<CMat>,
}

impl SpinorModule {
    pub fn new(n: usize) -> Result<Self> {
        let rep = clifford_rep(1, n)?;
        let g0 = rep.gammas[0].clone();
        let kappas = rep.gammas[1..].iter().map(|g| &g0 * g * I).collect();
        Ok(SpinorModule { rep, kappas })
    }

    pub fn n(&self) -> usize {
        self.kappas.len()
    }

    pub fn module_dim(&self) -> usize {
        self.rep.module_dim
    }

    /// x⋆ for x given in orthonormal-frame components.
    pub fn kappa(&self, x: &[f64]) -> CMat {
        let mut out = CMat::zeros(self.module_dim(), self.module_dim());
        for (k, &xa) in self.kappas.iter().zip(x) {
            if xa != 0.0 {
                out += k * C64::new(xa, 0.0);
            }
        }
        out
    }

    /// û = e₀•u.
    pub fn hat(&self, u: &CVec) -> CVec {
        &self.rep.gammas[0] * u
    }

    /// Riemannian volume element of the κ_j with ω² = 1; central for odd n.
    pub fn volume_element(&self) -> CMat {
        volume_of(&self.kappas, self.module_dim())
    }

    /// Orthogonal projector onto Δ± (the ±1 eigenspace of the volume
    /// element) for odd n, identity otherwise.
    pub fn parity_projector(&self, parity: Parity) -> CMat {
        let id = self.rep.identity();
        if parity == Parity::Full || self.n() % 2 == 0 {
            return id;
        }
        let w = self.volume_element();
        let s = if parity == Parity::Plus { 1.0 } else { -1.0 };
        (id + w * C64::new(s, 0.0)) * C64::new(0.5, 0.0)
    }

    /// Dimension carried by a field of the given parity.
    pub fn parity_dim(&self, parity: Parity) -> usize {
        if parity == Parity::Full || self.n() % 2 == 0 {
            self.module_dim()
        } else {
            self.module_dim() / 2
        }
    }
}

/// max |z| over the entries.
pub fn cmax(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn cnorm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}
