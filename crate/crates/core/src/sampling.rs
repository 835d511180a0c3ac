//! Seeded sampling of points, vectors and lattices.

use crate::geometry::ChartBox;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in `chart` after shrinking it by `margin_frac` of each width.
pub fn random_point(rng: &mut SeededRng, chart: &ChartBox, margin_frac: f64) -> Vec<f64> {
    let b = chart.shrunk(margin_frac);
    b.lo.iter().zip(&b.hi).map(|(a, c)| rng.gen_range(*a..*c)).collect()
}

pub fn random_points(rng: &mut SeededRng, chart: &ChartBox, margin_frac: f64, count: usize) -> Vec<Vec<f64>> {
    (0..count).map(|_| random_point(rng, chart, margin_frac)).collect()
}

/// Vector with independent entries uniform in [-1, 1].
pub fn random_vector(rng: &mut SeededRng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
}

/// Random vector normalized to |g(v,v)| = 1 (falls back to the raw draw if null).
pub fn random_unit_vector(rng: &mut SeededRng, g: &DMatrix<f64>) -> DVector<f64> {
    let v = random_vector(rng, g.nrows());
    let q = (v.transpose() * g * &v)[(0, 0)].abs();
    if q > 1e-12 {
        v / q.sqrt()
    } else {
        v
    }
}

/// Symmetric matrix with entries uniform in [-1, 1].
pub fn random_symmetric(rng: &mut SeededRng, n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    (&m + m.transpose()) * 0.5
}

/// Regular lattice with `per_axis` points per coordinate in the shrunk box.
/// For high dimension the lattice is the diagonal-free product truncated to
/// `cap` points in lexicographic order.
pub fn lattice(chart: &ChartBox, margin_frac: f64, per_axis: usize, cap: usize) -> Vec<Vec<f64>> {
    let b = chart.shrunk(margin_frac);
    let n = b.dim();
    let total = per_axis.checked_pow(n as u32).unwrap_or(usize::MAX);
    let count = total.min(cap);
    // Stride through the full lattice so a capped scan still covers it.
    let stride = (total / count.max(1)).max(1);
    (0..count)
        .map(|idx| {
            let mut rem = idx * stride;
            (0..n)
                .map(|k| {
                    let c = rem % per_axis;
                    rem /= per_axis;
                    let t = if per_axis == 1 { 0.5 } else { c as f64 / (per_axis - 1) as f64 };
                    b.lo[k] + t * (b.hi[k] - b.lo[k])
                })
                .collect()
        })
        .collect()
}
