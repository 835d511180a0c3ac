use nalgebra::DVector;
use std::sync::Arc;

pub type PositionFn = Arc<dyn Fn(f64) -> DVector<f64> + Send + Sync>;

/// A smooth piece parametrized on [0, 1].
#[derive(Clone)]
pub struct CurvePiece {
    pub position: PositionFn,
    pub velocity: PositionFn,
    /// Coordinate length estimate, used to choose step counts.
    pub length: f64,
}

/// A piecewise-smooth curve; the global parameter r ∈ [0,1] is split evenly
/// between the pieces. Transport integrates each piece separately so that
/// corners never fall inside a Runge-Kutta step.
#[derive(Clone)]
pub struct CurvePath {
    pub pieces: Vec<CurvePiece>,
    pub closed: bool,
}

impl std::fmt::Debug for CurvePath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CurvePath")
            .field("pieces", &self.pieces.len())
            .field("closed", &self.closed)
            .field("start", &self.start().as_slice())
            .finish()
    }
}

impl CurvePath {
    /// Straight coordinate segment from `a` to `b`.
    pub fn segment(a: &[f64], b: &[f64]) -> CurvePath {
        CurvePath { pieces: vec![segment_piece(a, b)], closed: false }
    }

    /// Polyline through the given vertices.
    pub fn polyline(vertices: &[Vec<f64>], closed: bool) -> CurvePath {
        assert!(vertices.len() >= 2);
        let mut pieces: Vec<CurvePiece> = vertices.windows(2).map(|w| segment_piece(&w[0], &w[1])).collect();
        if closed {
            let last = vertices.last().unwrap();
            if last != &vertices[0] {
                pieces.push(segment_piece(last, &vertices[0]));
            }
        }
        CurvePath { pieces, closed }
    }

    /// Square loop in the (i, j) coordinate plane with side `h` starting at `base`.
    pub fn plaquette(base: &[f64], i: usize, j: usize, h: f64) -> CurvePath {
        let b = base.to_vec();
        let mut v1 = b.clone();
        v1[i] += h;
        let mut v2 = v1.clone();
        v2[j] += h;
        let mut v3 = b.clone();
        v3[j] += h;
        CurvePath::polyline(&[b.clone(), v1, v2, v3, b], true)
    }

    /// A single custom smooth piece.
    pub fn custom(position: PositionFn, velocity: PositionFn, length: f64, closed: bool) -> CurvePath {
        CurvePath { pieces: vec![CurvePiece { position, velocity, length }], closed }
    }

    /// Concatenation, self first.
    pub fn then(&self, other: &CurvePath) -> CurvePath {
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        let closed = (self.start() - other.end()).amax() < 1e-12;
        CurvePath { pieces, closed }
    }

    /// The same curve traversed backwards.
    pub fn reversed(&self) -> CurvePath {
        let pieces = self
            .pieces
            .iter()
            .rev()
            .map(|p| {
                let pos = p.position.clone();
                let vel = p.velocity.clone();
                CurvePiece {
                    position: Arc::new(move |r| pos(1.0 - r)),
                    velocity: Arc::new(move |r| -vel(1.0 - r)),
                    length: p.length,
                }
            })
            .collect();
        CurvePath { pieces, closed: self.closed }
    }

    fn locate(&self, r: f64) -> (usize, f64) {
        let m = self.pieces.len();
        let x = (r.clamp(0.0, 1.0) * m as f64).min(m as f64);
        let idx = (x.floor() as usize).min(m - 1);
        (idx, x - idx as f64)
    }

    pub fn position(&self, r: f64) -> DVector<f64> {
        let (i, s) = self.locate(r);
        (self.pieces[i].position)(s)
    }

    /// Velocity with respect to the global parameter.
    pub fn velocity(&self, r: f64) -> DVector<f64> {
        let (i, s) = self.locate(r);
        (self.pieces[i].velocity)(s) * self.pieces.len() as f64
    }

    pub fn start(&self) -> DVector<f64> {
        (self.pieces[0].position)(0.0)
    }

    pub fn end(&self) -> DVector<f64> {
        (self.pieces.last().unwrap().position)(1.0)
    }

    pub fn length(&self) -> f64 {
        self.pieces.iter().map(|p| p.length).sum()
    }

    /// Gap between endpoints.
    pub fn closure_gap(&self) -> f64 {
        (self.start() - self.end()).amax()
    }

    /// Largest mismatch between the stored velocity and a central difference
    /// of the position, sampled inside each piece.
    pub fn velocity_defect(&self, samples_per_piece: usize) -> f64 {
        let h = 1e-5;
        let mut worst = 0.0_f64;
        for p in &self.pieces {
            for k in 0..samples_per_piece {
                let s = (k as f64 + 0.5) / samples_per_piece as f64;
                let fd = ((p.position)(s + h) - (p.position)(s - h)) / (2.0 * h);
                let scale = 1.0 + fd.amax();
                worst = worst.max((fd - (p.velocity)(s)).amax() / scale);
            }
        }
        worst
    }
}

fn segment_piece(a: &[f64], b: &[f64]) -> CurvePiece {
    let a = DVector::from_column_slice(a);
    let b = DVector::from_column_slice(b);
    let d = &b - &a;
    let length = d.norm();
    let a2 = a.clone();
    let d2 = d.clone();
    CurvePiece {
        position: Arc::new(move |r| &a2 + &d2 * r),
        velocity: Arc::new(move |_r| d.clone()),
        length,
    }
}
