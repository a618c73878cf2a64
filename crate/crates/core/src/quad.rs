//! Quadrature rules and piecewise quintic Hermite interpolation on uniform
//! grids.

use alloc::vec::Vec;

/// Composite trapezoid rule on a uniform grid with spacing `h`.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..n - 1].iter().sum();
    h * (inner + 0.5 * (values[0] + values[n - 1]))
}

/// Trapezoid value together with the Richardson estimate of its error,
/// obtained from the rule on every other node. Requires an odd node count.
pub fn trapezoid_with_error(values: &[f64], h: f64) -> (f64, f64) {
    let fine = trapezoid(values, h);
    if values.len() < 5 || values.len() % 2 == 0 {
        return (fine, f64::INFINITY);
    }
    let coarse: Vec<f64> = values.iter().step_by(2).copied().collect();
    let c = trapezoid(&coarse, 2.0 * h);
    (fine, (fine - c).abs() / 3.0)
}

/// Trapezoid weights for `n` uniform nodes.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = alloc::vec![h; n];
    if n > 0 {
        w[0] = 0.5 * h;
        w[n - 1] = 0.5 * h;
    }
    w
}

/// Four-point Gauss–Legendre nodes on `[-1, 1]`.
pub const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];

/// Four-point Gauss–Legendre weights on `[-1, 1]`.
pub const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_85,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_85,
];

/// Composite 4-point Gauss–Legendre nodes and weights on `[a, b]` with
/// `panels` equal panels.
pub fn gauss_legendre_panels(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(4 * panels);
    if panels == 0 || b <= a {
        return out;
    }
    let w = (b - a) / panels as f64;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * w;
        for k in 0..4 {
            out.push((mid + 0.5 * w * GL4_NODES[k], 0.5 * w * GL4_WEIGHTS[k]));
        }
    }
    out
}

/// Tabulated function on a uniform grid with first and second derivative
/// columns, interpolated by C² quintic Hermite pieces and clamped to the
/// end values outside the grid.
#[derive(Debug, Clone)]
pub struct HermiteTable {
    x0: f64,
    h: f64,
    v: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl HermiteTable {
    /// Builds the table. All columns must have equal length ≥ 2.
    pub fn new(x0: f64, h: f64, v: Vec<f64>, d1: Vec<f64>, d2: Vec<f64>) -> Self {
        assert!(v.len() >= 2 && v.len() == d1.len() && v.len() == d2.len());
        Self { x0, h, v, d1, d2 }
    }

    /// Node values.
    pub fn values(&self) -> &[f64] {
        &self.v
    }

    /// Node first derivatives.
    pub fn first(&self) -> &[f64] {
        &self.d1
    }

    /// Node second derivatives.
    pub fn second(&self) -> &[f64] {
        &self.d2
    }

    /// Value, first and second derivative at `x`.
    pub fn eval3(&self, x: f64) -> [f64; 3] {
        let n = self.v.len();
        let u = (x - self.x0) / self.h;
        if u < 0.0 {
            return [self.v[0], 0.0, 0.0];
        }
        if u > (n - 1) as f64 {
            return [self.v[n - 1], 0.0, 0.0];
        }
        let i = (u as usize).min(n - 2);
        let t = u - i as f64;
        let h = self.h;
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);
        let h0 = [1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5, -30.0 * t2 + 60.0 * t3 - 30.0 * t4, -60.0 * t + 180.0 * t2 - 120.0 * t3];
        let h1 = [t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5, 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4, -36.0 * t + 96.0 * t2 - 60.0 * t3];
        let h2 = [
            0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5,
            t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4,
            1.0 - 9.0 * t + 18.0 * t2 - 10.0 * t3,
        ];
        let g0 = [10.0 * t3 - 15.0 * t4 + 6.0 * t5, 30.0 * t2 - 60.0 * t3 + 30.0 * t4, 60.0 * t - 180.0 * t2 + 120.0 * t3];
        let g1 = [-4.0 * t3 + 7.0 * t4 - 3.0 * t5, -12.0 * t2 + 28.0 * t3 - 15.0 * t4, -24.0 * t + 84.0 * t2 - 60.0 * t3];
        let g2 = [0.5 * t3 - t4 + 0.5 * t5, 1.5 * t2 - 4.0 * t3 + 2.5 * t4, 3.0 * t - 12.0 * t2 + 10.0 * t3];
        let (a0, a1, a2) = (self.v[i], h * self.d1[i], h * h * self.d2[i]);
        let (b0, b1, b2) = (self.v[i + 1], h * self.d1[i + 1], h * h * self.d2[i + 1]);
        let mut out = [0.0; 3];
        for k in 0..3 {
            out[k] = a0 * h0[k] + a1 * h1[k] + a2 * h2[k] + b0 * g0[k] + b1 * g1[k] + b2 * g2[k];
        }
        out[1] /= h;
        out[2] /= h * h;
        out
    }

    /// Value at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval3(x)[0]
    }
}

/// Fourth-order first derivative on a uniform grid (one-sided second order
/// at the two nodes next to each end).
pub fn derivative4(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut d = alloc::vec![0.0; n];
    if n < 5 {
        for i in 0..n {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            d[i] = (values[b] - values[a]) / ((b - a).max(1) as f64 * h);
        }
        return d;
    }
    for i in 2..n - 2 {
        d[i] = (values[i - 2] - 8.0 * values[i - 1] + 8.0 * values[i + 1] - values[i + 2]) / (12.0 * h);
    }
    d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    d[1] = (values[2] - values[0]) / (2.0 * h);
    d[n - 2] = (values[n - 1] - values[n - 3]) / (2.0 * h);
    d[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    #[allow(unused_imports)]
    use num_traits::Float;

    #[test]
    fn hermite_reproduces_quintics() {
        let p = |x: f64| [1.0 + x - 2.0 * x.powi(3) + 0.3 * x.powi(5), 1.0 - 6.0 * x * x + 1.5 * x.powi(4), -12.0 * x + 6.0 * x.powi(3)];
        let h = 0.37;
        let xs: Vec<f64> = (0..9).map(|i| -1.0 + i as f64 * h).collect();
        let t = HermiteTable::new(-1.0, h, xs.iter().map(|&x| p(x)[0]).collect(), xs.iter().map(|&x| p(x)[1]).collect(), xs.iter().map(|&x| p(x)[2]).collect());
        for k in 0..200 {
            let x = -1.0 + 2.9 * k as f64 / 200.0;
            let got = t.eval3(x);
            let want = p(x);
            for j in 0..3 {
                assert!((got[j] - want[j]).abs() < 1e-10, "{x} {j}");
            }
        }
    }

    #[test]
    fn gauss_legendre_integrates_septics_exactly() {
        let f = |x: f64| 3.0 * x.powi(7) - x.powi(4) + 2.0;
        let exact = |x: f64| 3.0 / 8.0 * x.powi(8) - x.powi(5) / 5.0 + 2.0 * x;
        let got: f64 = gauss_legendre_panels(-0.3, 1.7, 1).iter().map(|&(x, w)| w * f(x)).sum();
        assert!((got - (exact(1.7) - exact(-0.3))).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_error_estimate_tracks_second_order() {
        // ∫_0^1 x² = 1/3; trapezoid error is h²/6 for this integrand.
        for &n in &[11usize, 21, 41] {
            let h = 1.0 / (n - 1) as f64;
            let v: Vec<f64> = (0..n).map(|i| (i as f64 * h).powi(2)).collect();
            let (val, est) = trapezoid_with_error(&v, h);
            let err = (val - 1.0 / 3.0).abs();
            assert!((est - err).abs() < 1e-3 * err + 1e-15);
        }
    }

    #[test]
    fn derivative4_is_fourth_order() {
        let errs: Vec<f64> = [50usize, 100]
            .iter()
            .map(|&n| {
                let h = 1.0 / n as f64;
                let v: Vec<f64> = (0..=n).map(|i| (3.0 * i as f64 * h).sin()).collect();
                let d = derivative4(&v, h);
                (2..n - 1).map(|i| (d[i] - 3.0 * (3.0 * i as f64 * h).cos()).abs()).fold(0.0, f64::max)
            })
            .collect();
        assert!((errs[0] / errs[1]).log2() > 3.8);
    }
}
