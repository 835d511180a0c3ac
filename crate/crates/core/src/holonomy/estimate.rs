//! Holonomy algebra estimates from loop transports and from back-transported
//! curvature endomorphisms.

use crate::error::{Error, Result};
use crate::geometry::{riemann, transport_matrix, ChartBox, CurvePath, ManifoldModel, TransportOptions};
use crate::linalg::{default_rank, matrix_log, singular_values_desc};
use crate::sampling;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

/// Largest accepted closure gap of a loop.
pub const LOOP_CLOSURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct HolonomyOptions {
    /// Side lengths of the coordinate plaquettes at the basepoint. Remote
    /// points use the smallest.
    pub plaquette_sizes: Vec<f64>,
    pub remote_points: usize,
    /// Remote points are drawn from basepoint ± this, per axis.
    pub remote_half_width: f64,
    /// Fraction of the chart width kept clear of the boundary.
    pub chart_margin: f64,
    pub seed: u64,
    pub transport: TransportOptions,
}

impl Default for HolonomyOptions {
    fn default() -> Self {
        HolonomyOptions {
            plaquette_sizes: vec![0.05, 0.1],
            remote_points: 20,
            remote_half_width: 0.5,
            chart_margin: 0.05,
            seed: 11,
            transport: TransportOptions { tol: 1e-12, ..TransportOptions::default() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HolonomyMethod {
    LoopSampling,
    AmbroseSinger,
    Both,
}

impl HolonomyMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            HolonomyMethod::LoopSampling => "loop-sampling",
            HolonomyMethod::AmbroseSinger => "ambrose-singer",
            HolonomyMethod::Both => "both",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolonomyEstimate {
    pub basepoint: Vec<f64>,
    /// Metric at the basepoint.
    pub metric: DMatrix<f64>,
    /// Raw samples in index order.
    pub generators: Vec<DMatrix<f64>>,
    /// Frobenius-orthonormal basis of the estimated algebra.
    pub basis: Vec<DMatrix<f64>>,
    pub dimension: usize,
    pub singular_values: Vec<f64>,
    /// s_dim-1 / s_dim of the flattened sample matrix.
    pub gap_ratio: f64,
    pub method: HolonomyMethod,
    /// max |gB + Bᵀg| / (|g| max|B|) over the samples.
    pub skew_residual: f64,
    /// Rank of the first half of the samples; `None` if ambiguous.
    pub half_sample_dimension: Option<usize>,
    /// max over basis pairs of the part of [B_i, B_j] outside the span.
    pub closure_residual: f64,
}

impl HolonomyEstimate {
    pub fn stable(&self) -> bool {
        self.half_sample_dimension == Some(self.dimension)
    }

    /// Distance between the spans of two estimates (flattened).
    pub fn span_distance(&self, other: &HolonomyEstimate) -> f64 {
        crate::linalg::subspace_distance(&flatten(&self.basis), &flatten(&other.basis))
    }
}

fn flatten(mats: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n = mats.first().map_or(0, |m| m.nrows());
    let cols: Vec<DVector<f64>> = mats.iter().map(|m| DVector::from_column_slice(m.as_slice())).collect();
    if cols.is_empty() {
        DMatrix::zeros(n * n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

fn rank_of(gens: &[DMatrix<f64>]) -> Result<usize> {
    if gens.is_empty() {
        return Ok(0);
    }
    Ok(default_rank(&singular_values_desc(&flatten(gens)))?.rank)
}

/// Rank, basis and diagnostics of the span of `generators`.
pub fn estimate_from_generators(
    basepoint: &[f64],
    metric: &DMatrix<f64>,
    generators: Vec<DMatrix<f64>>,
    method: HolonomyMethod,
) -> Result<HolonomyEstimate> {
    let n = metric.nrows();
    let m = flatten(&generators);
    let singular_values = singular_values_desc(&m);
    let decision = default_rank(&singular_values)?;
    let dimension = decision.rank;
    let basis: Vec<DMatrix<f64>> = if dimension == 0 {
        Vec::new()
    } else {
        let svd = m.clone().svd(true, false);
        let u = svd.u.unwrap();
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap());
        order[..dimension].iter().map(|&c| DMatrix::from_column_slice(n, n, u.column(c).as_slice())).collect()
    };
    let gmax = generators.iter().map(|b| b.norm()).fold(0.0, f64::max);
    let skew_residual = if gmax == 0.0 {
        0.0
    } else {
        generators.iter().map(|b| (metric * b + b.transpose() * metric).norm()).fold(0.0, f64::max) / (metric.norm() * gmax)
    };
    let half_sample_dimension = rank_of(&generators[..generators.len() / 2]).ok();
    let flat_basis = flatten(&basis);
    let mut closure_residual = 0.0_f64;
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let c = &basis[i] * &basis[j] - &basis[j] * &basis[i];
            let v = DVector::from_column_slice(c.as_slice());
            let proj = &flat_basis * (flat_basis.transpose() * &v);
            closure_residual = closure_residual.max((v - proj).norm());
        }
    }
    Ok(HolonomyEstimate {
        basepoint: basepoint.to_vec(),
        metric: metric.clone(),
        generators,
        basis,
        dimension,
        singular_values,
        gap_ratio: decision.gap_ratio,
        method,
        skew_residual,
        half_sample_dimension,
        closure_residual,
    })
}

/// Seeded remote points in basepoint ± half width, clipped so that a
/// plaquette of side `reach` stays inside the shrunk chart.
pub fn remote_points(chart: &ChartBox, basepoint: &[f64], opts: &HolonomyOptions, reach: f64) -> Vec<Vec<f64>> {
    let inner = chart.shrunk(opts.chart_margin);
    let lo: Vec<f64> = basepoint.iter().zip(&inner.lo).map(|(b, l)| (b - opts.remote_half_width).max(*l)).collect();
    let hi: Vec<f64> = basepoint.iter().zip(&inner.hi).map(|(b, h)| (b + opts.remote_half_width).min(h - reach)).collect();
    let mut rng = sampling::rng(opts.seed);
    (0..opts.remote_points)
        .map(|_| lo.iter().zip(&hi).map(|(a, b)| if a < b { rng.gen_range(*a..*b) } else { *a }).collect())
        .collect()
}

fn planes(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Principal log of the transport around a closed loop.
pub fn loop_generator(model: &ManifoldModel, curve: &CurvePath, opts: &TransportOptions) -> Result<DMatrix<f64>> {
    let gap = curve.closure_gap();
    if gap > LOOP_CLOSURE_TOL {
        return Err(Error::OpenLoop { gap });
    }
    matrix_log(&transport_matrix(model, curve, opts)?.matrix)
}

/// Transports along the segments from the basepoint to each remote point.
fn segment_transports(model: &ManifoldModel, basepoint: &[f64], remote: &[Vec<f64>], opts: &TransportOptions) -> Result<Vec<(DMatrix<f64>, DMatrix<f64>)>> {
    remote
        .par_iter()
        .map(|q| {
            let t = transport_matrix(model, &CurvePath::segment(basepoint, q), opts)?.matrix;
            let ti = t.clone().try_inverse().ok_or(Error::SingularMetric { point: q.clone(), condition: f64::INFINITY })?;
            Ok((t, ti))
        })
        .collect()
}

/// Holonomy algebra from logs of coordinate-plaquette transports at the
/// basepoint and at seeded remote points (conjugated back along segments).
pub fn loop_holonomy(model: &ManifoldModel, basepoint: &[f64], opts: &HolonomyOptions) -> Result<HolonomyEstimate> {
    let n = model.dim;
    let small = opts.plaquette_sizes.iter().cloned().fold(f64::INFINITY, f64::min);
    let remote = remote_points(&model.chart, basepoint, opts, small);
    let conj = segment_transports(model, basepoint, &remote, &opts.transport)?;
    let mut tasks: Vec<(Option<usize>, Vec<f64>, usize, usize, f64)> = Vec::new();
    for &h in &opts.plaquette_sizes {
        for (i, j) in planes(n) {
            tasks.push((None, basepoint.to_vec(), i, j, h));
        }
    }
    for (k, q) in remote.iter().enumerate() {
        for (i, j) in planes(n) {
            tasks.push((Some(k), q.clone(), i, j, small));
        }
    }
    let gens: Vec<DMatrix<f64>> = tasks
        .par_iter()
        .map(|(k, q, i, j, h)| {
            let l = loop_generator(model, &CurvePath::plaquette(q, *i, *j, *h), &opts.transport)?;
            Ok(match k {
                None => l,
                Some(k) => &conj[*k].1 * l * &conj[*k].0,
            })
        })
        .collect::<Result<_>>()?;
    estimate_from_generators(basepoint, &model.metric(basepoint), gens, HolonomyMethod::LoopSampling)
}

/// Holonomy algebra from arbitrary closed loops based at `basepoint`.
pub fn loop_holonomy_with(model: &ManifoldModel, basepoint: &[f64], loops: &[CurvePath], opts: &TransportOptions) -> Result<HolonomyEstimate> {
    let bp = DVector::from_column_slice(basepoint);
    let gens: Vec<DMatrix<f64>> = loops
        .par_iter()
        .map(|c| {
            let gap = (c.start() - &bp).amax().max(c.closure_gap());
            if gap > LOOP_CLOSURE_TOL {
                return Err(Error::OpenLoop { gap });
            }
            loop_generator(model, c, opts)
        })
        .collect::<Result<_>>()?;
    estimate_from_generators(basepoint, &model.metric(basepoint), gens, HolonomyMethod::LoopSampling)
}

/// Span of τ_δ⁻¹ R(∂_i, ∂_j) τ_δ over the basepoint and the remote points,
/// δ the coordinate segment from the basepoint. The samples are scaled by
/// the smallest plaquette area so that they match the loop generators to
/// first order and share their absolute rank floor.
pub fn ambrose_singer_span(model: &ManifoldModel, basepoint: &[f64], opts: &HolonomyOptions) -> Result<HolonomyEstimate> {
    let n = model.dim;
    let small = opts.plaquette_sizes.iter().cloned().fold(f64::INFINITY, f64::min);
    let remote = remote_points(&model.chart, basepoint, opts, small);
    let conj = segment_transports(model, basepoint, &remote, &opts.transport)?;
    let area = small * small;
    let mut points = vec![basepoint.to_vec()];
    points.extend(remote);
    let per_point: Vec<Vec<DMatrix<f64>>> = points
        .par_iter()
        .enumerate()
        .map(|(k, q)| {
            let r = riemann(model, q)?;
            Ok(planes(n)
                .into_iter()
                .map(|(i, j)| {
                    let (mut ei, mut ej) = (DVector::zeros(n), DVector::zeros(n));
                    ei[i] = 1.0;
                    ej[j] = 1.0;
                    let e = r.endomorphism(&ei, &ej) * area;
                    if k == 0 {
                        e
                    } else {
                        &conj[k - 1].1 * e * &conj[k - 1].0
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let gens = per_point.into_iter().flatten().collect();
    estimate_from_generators(basepoint, &model.metric(basepoint), gens, HolonomyMethod::AmbroseSinger)
}

/// Both methods and the estimate of their combined samples.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidated {
    pub loops: HolonomyEstimate,
    pub curvature: HolonomyEstimate,
    pub combined: HolonomyEstimate,
}

impl CrossValidated {
    /// Same rank for all three and matching spans.
    pub fn agree(&self, tol: f64) -> bool {
        self.loops.dimension == self.curvature.dimension
            && self.combined.dimension == self.loops.dimension
            && self.loops.span_distance(&self.curvature) <= tol
    }
}

pub fn holonomy_both(model: &ManifoldModel, basepoint: &[f64], opts: &HolonomyOptions) -> Result<CrossValidated> {
    let loops = loop_holonomy(model, basepoint, opts)?;
    let curvature = ambrose_singer_span(model, basepoint, opts)?;
    let mut gens = loops.generators.clone();
    gens.extend(curvature.generators.iter().cloned());
    let combined = estimate_from_generators(basepoint, &loops.metric, gens, HolonomyMethod::Both)?;
    Ok(CrossValidated { loops, curvature, combined })
}
