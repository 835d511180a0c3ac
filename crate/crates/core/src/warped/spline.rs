/// Piecewise cubic Hermite interpolant of an antiderivative, built from
/// node values (adaptive Simpson) and the exact integrand at the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteSpline {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
}

impl HermiteSpline {
    /// I(s) = ∫_origin^s g(σ) dσ on [lo, hi], nodes every ≤ `spacing`,
    /// absolute quadrature tolerance `tol` for the whole range.
    pub fn antiderivative<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, origin: f64, spacing: f64, tol: f64) -> Self {
        assert!(lo <= origin && origin <= hi);
        let count = (((hi - lo) / spacing).ceil() as usize).max(2);
        let mut knots: Vec<f64> = (0..=count).map(|i| lo + (hi - lo) * i as f64 / count as f64).collect();
        if !knots.iter().any(|&k| k == origin) {
            knots.push(origin);
            knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        let o = knots.iter().position(|&k| k == origin).unwrap();
        let per = tol / knots.len() as f64;
        let mut values = vec![0.0; knots.len()];
        for i in o + 1..knots.len() {
            values[i] = values[i - 1] + adaptive_simpson(&g, knots[i - 1], knots[i], per);
        }
        for i in (0..o).rev() {
            values[i] = values[i + 1] - adaptive_simpson(&g, knots[i], knots[i + 1], per);
        }
        let slopes = knots.iter().map(|&k| g(k)).collect();
        HermiteSpline { knots, values, slopes }
    }

    fn interval(&self, s: f64) -> usize {
        let n = self.knots.len();
        match self.knots.binary_search_by(|k| k.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        let i = self.interval(s);
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let h = x1 - x0;
        let t = (s - x0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.values[i] + h10 * h * self.slopes[i] + h01 * self.values[i + 1] + h11 * h * self.slopes[i + 1]
    }

    pub fn derivative(&self, s: f64) -> f64 {
        let i = self.interval(s);
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let h = x1 - x0;
        let t = (s - x0) / h;
        let t2 = t * t;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        d00 * self.values[i] + d10 * self.slopes[i] + d01 * self.values[i + 1] + d11 * self.slopes[i + 1]
    }
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, tol: f64) -> f64 {
    let fa = g(a);
    let fb = g(b);
    let m = 0.5 * (a + b);
    let fm = g(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(g, a, b, fa, fm, fb, whole, tol, 40)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = g(lm);
    let frm = g(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + simpson_rec(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_exact_for_cubics() {
        let v = adaptive_simpson(&|x: f64| x * x * x - x, 0.0, 2.0, 1e-12);
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn spline_reproduces_exponential_integral() {
        // ∫₀ˢ −2e^{−2σ} dσ = e^{−2s} − 1
        let sp = HermiteSpline::antiderivative(|s| -2.0 * (-2.0 * s).exp(), -1.0, 1.5, 0.0, 2e-3, 1e-10);
        for k in 0..97 {
            let s = -0.99 + 2.48 * k as f64 / 96.0;
            assert!((sp.eval(s) - ((-2.0 * s).exp() - 1.0)).abs() < 1e-10);
            assert!((sp.derivative(s) + 2.0 * (-2.0 * s).exp()).abs() < 1e-7);
        }
    }
}
