//! One-dimensional profile problems on a symmetric ρ-window.
//!
//! The heteroclinic profile `θ0` solves `θ'' = f'(θ)`, `θ(±∞) = ±1`,
//! `θ(0) = 0`. Linearized problems `c'' − f''(θ0) c = r` are solved with a
//! Lagrange multiplier on `θ0'` and the normalisation `c(0) = 0`.
//! Both use the fourth-order compact (Numerov) discretisation, which keeps
//! every system tridiagonal.

use crate::error::{Error, Result};
use crate::linalg::{solve_tridiagonal, BorderedTridiagonal};
use crate::potential::DoubleWell;
use crate::quad::{derivative4, trapezoid, trapezoid_weights, trapezoid_with_error, HermiteTable};
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Uniform symmetric grid on `[-L, L]` with an odd node count, so that
/// `ρ = 0` is the middle node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoGrid {
    half_width: f64,
    nodes: usize,
}

impl RhoGrid {
    /// Grid with `nodes` points on `[-half_width, half_width]`.
    pub fn new(half_width: f64, nodes: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidInput("rho half-width must be positive".into()));
        }
        if nodes < 5 || nodes % 2 == 0 {
            return Err(Error::InvalidInput("rho grid needs an odd node count >= 5".into()));
        }
        Ok(Self { half_width, nodes })
    }

    /// Half-width `L`.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Node count.
    pub fn len(&self) -> usize {
        self.nodes
    }

    /// Always false; grids have at least five nodes.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spacing.
    pub fn h(&self) -> f64 {
        2.0 * self.half_width / (self.nodes - 1) as f64
    }

    /// Index of `ρ = 0`.
    pub fn mid(&self) -> usize {
        self.nodes / 2
    }

    /// Coordinate of node `i`.
    pub fn node(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h()
    }

    /// All node coordinates.
    pub fn coords(&self) -> Vec<f64> {
        (0..self.nodes).map(|i| self.node(i)).collect()
    }
}

impl Default for RhoGrid {
    fn default() -> Self {
        Self { half_width: 20.0, nodes: 4001 }
    }
}

/// C^∞ step on `[0, 1]`: value, first and second derivative. Zero for
/// `x ≤ 0`, one for `x ≥ 1`, `S(1 − x) = 1 − S(x)`, slope at most 2.
pub fn smooth_step(x: f64) -> [f64; 3] {
    if x <= 0.0 {
        return [0.0, 0.0, 0.0];
    }
    if x >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let y = 1.0 - x;
    let z = 1.0 / y - 1.0 / x;
    let dz = 1.0 / (y * y) + 1.0 / (x * x);
    let d2z = 2.0 / (y * y * y) - 2.0 / (x * x * x);
    let (s, s1m) = if z >= 0.0 {
        let e = (-z).exp();
        (1.0 / (1.0 + e), e / (1.0 + e))
    } else {
        let e = z.exp();
        (e / (1.0 + e), 1.0 / (1.0 + e))
    };
    let g = s * s1m;
    [s, g * dz, g * (s1m - s) * dz * dz + g * d2z]
}

/// Tabulated profile with derivative columns and tail diagnostics.
#[derive(Debug, Clone)]
pub struct ProfileSolution {
    /// Grid the profile lives on.
    pub grid: RhoGrid,
    /// Node values.
    pub values: Vec<f64>,
    /// First derivative at the nodes.
    pub derivative: Vec<f64>,
    /// Second derivative at the nodes.
    pub second: Vec<f64>,
    /// Limits at `-∞` and `+∞`.
    pub far_field: (f64, f64),
    /// Exponential tail rate; infinite for compactly supported profiles.
    pub decay_rate: f64,
    /// Envelope constant: `|v − far| ≤ C e^{−α|ρ|}` on the outer half.
    pub decay_constant: f64,
}

impl ProfileSolution {
    fn assemble(grid: RhoGrid, values: Vec<f64>, derivative: Vec<f64>, second: Vec<f64>, far_field: (f64, f64)) -> Self {
        let (decay_rate, decay_constant) = fit_decay(&grid, &values, far_field);
        Self { grid, values, derivative, second, far_field, decay_rate, decay_constant }
    }

    /// C² interpolant, clamped to the end values outside the window.
    pub fn table(&self) -> HermiteTable {
        HermiteTable::new(self.grid.node(0), self.grid.h(), self.values.clone(), self.derivative.clone(), self.second.clone())
    }

    /// Value at the node nearest to `ρ = 0`.
    pub fn at_origin(&self) -> f64 {
        self.values[self.grid.mid()]
    }
}

/// Least-squares tail rate of `|v − far|` on `L/2 ≤ |ρ| ≤ L − 2`, shrunk by
/// one percent so that the fitted envelope is a bound.
fn fit_decay(grid: &RhoGrid, v: &[f64], far: (f64, f64)) -> (f64, f64) {
    let l = grid.half_width();
    let mut pts = Vec::new();
    for (i, &vi) in v.iter().enumerate() {
        let r = grid.node(i);
        if r.abs() < 0.5 * l || r.abs() > l - 2.0 {
            continue;
        }
        let ff = if r < 0.0 { far.0 } else { far.1 };
        let e = (vi - ff).abs();
        if e > 1e-300 {
            pts.push((r.abs(), e.ln()));
        }
    }
    if pts.len() < 4 {
        return (f64::INFINITY, 0.0);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = -sxy / sxx;
    if !(slope > 0.0) {
        return (0.0, f64::INFINITY);
    }
    let alpha = 0.99 * slope;
    let mut c: f64 = 0.0;
    for (i, &vi) in v.iter().enumerate() {
        let r = grid.node(i);
        if r.abs() < 0.5 * l {
            continue;
        }
        let ff = if r < 0.0 { far.0 } else { far.1 };
        c = c.max((vi - ff).abs() * (alpha * r.abs()).exp());
    }
    (alpha, c)
}

/// Numerov residual of `θ'' = f'(θ)` scaled to ODE units, interior nodes.
pub fn profile_residual(grid: &RhoGrid, theta: &[f64], well: &DoubleWell) -> f64 {
    let h = grid.h();
    let k = h * h / 12.0;
    (1..theta.len() - 1)
        .map(|i| {
            let g = theta[i + 1] - 2.0 * theta[i] + theta[i - 1] - k * (well.df(theta[i + 1]) + 10.0 * well.df(theta[i]) + well.df(theta[i - 1]));
            g.abs() / (h * h)
        })
        .fold(0.0, f64::max)
}

/// Solves for the heteroclinic profile by Newton's method from
/// `tanh(ρ/√2)`.
pub fn solve_theta0(grid: &RhoGrid, well: &DoubleWell) -> Result<ProfileSolution> {
    let n = grid.len();
    let h = grid.h();
    let k = h * h / 12.0;
    let mid = grid.mid();
    let mut th: Vec<f64> = (0..n).map(|i| (grid.node(i) / 2f64.sqrt()).tanh()).collect();
    th[0] = -1.0;
    th[n - 1] = 1.0;
    th[mid] = 0.0;
    let (mut sub, mut diag, mut sup, mut g) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let max_iter = 50;
    let mut res = f64::INFINITY;
    let mut converged = false;
    for _ in 0..max_iter {
        for i in 0..n {
            if i == 0 || i == n - 1 || i == mid {
                sub[i] = 0.0;
                sup[i] = 0.0;
                diag[i] = 1.0;
                g[i] = 0.0;
                continue;
            }
            sub[i] = 1.0 - k * well.d2f(th[i - 1]);
            diag[i] = -2.0 - 10.0 * k * well.d2f(th[i]);
            sup[i] = 1.0 - k * well.d2f(th[i + 1]);
            g[i] = -(th[i + 1] - 2.0 * th[i] + th[i - 1] - k * (well.df(th[i + 1]) + 10.0 * well.df(th[i]) + well.df(th[i - 1])));
        }
        res = g.iter().map(|v| v.abs()).fold(0.0, f64::max) / (h * h);
        if res <= 1e-10 {
            converged = true;
            break;
        }
        solve_tridiagonal(&sub, &diag, &sup, &mut g)?;
        for (t, d) in th.iter_mut().zip(&g) {
            *t += d;
        }
        if !th.iter().all(|v| v.is_finite()) {
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { iterations: max_iter, residual: res });
    }
    let probe = (1.0 / h).round() as usize;
    let mismatch = (th[probe] + 1.0).abs().max((th[n - 1 - probe] - 1.0).abs());
    if mismatch > 1e-8 {
        return Err(Error::GridTooNarrow { mismatch });
    }
    let deriv: Vec<f64> = th.iter().map(|&t| (2.0 * well.f(t)).sqrt()).collect();
    let second: Vec<f64> = th.iter().map(|&t| well.df(t)).collect();
    Ok(ProfileSolution::assemble(*grid, th, deriv, second, (-1.0, 1.0)))
}

/// The cutoff `η`: zero for `ρ ≤ −1`, one for `ρ ≥ 1`, nondecreasing,
/// `η(ρ) − ½` odd.
pub fn eta(rho: f64) -> [f64; 3] {
    let s = smooth_step(0.5 * (rho + 1.0));
    [s[0], 0.5 * s[1], 0.25 * s[2]]
}

/// Tabulates `η` on the grid.
pub fn build_eta(grid: &RhoGrid) -> ProfileSolution {
    let cols: Vec<[f64; 3]> = (0..grid.len()).map(|i| eta(grid.node(i))).collect();
    ProfileSolution::assemble(
        *grid,
        cols.iter().map(|c| c[0]).collect(),
        cols.iter().map(|c| c[1]).collect(),
        cols.iter().map(|c| c[2]).collect(),
        (0.0, 1.0),
    )
}

/// Integrals of the profiles used by the expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentTable {
    /// `σ = ½ ∫ θ0'²`.
    pub sigma: f64,
    /// `∫ θ0'`, equal to 2.
    pub int_theta0p: f64,
    /// `∫ η θ0'`, equal to 1.
    pub int_eta_theta0p: f64,
    /// `K = ∫ η' θ0'`.
    pub k_eta: f64,
    /// `η̃ = ½ K`.
    pub eta_tilde: f64,
    /// `∫ (η − ½) θ0'`, zero by symmetry.
    pub eta_orthogonality: f64,
    /// Largest Richardson error estimate among the integrals.
    pub quad_error: f64,
}

/// Computes the moment table; `theta0` and `eta` must share a grid.
pub fn compute_moments(theta0: &ProfileSolution, eta: &ProfileSolution) -> Result<MomentTable> {
    if theta0.grid != eta.grid {
        return Err(Error::GridMismatch("theta0 and eta grids differ".into()));
    }
    let h = theta0.grid.h();
    let tp = &theta0.derivative;
    let sq: Vec<f64> = tp.iter().map(|v| v * v).collect();
    let (i_sq, e1) = trapezoid_with_error(&sq, h);
    let (i_tp, e2) = trapezoid_with_error(tp, h);
    let et: Vec<f64> = eta.values.iter().zip(tp).map(|(a, b)| a * b).collect();
    let (i_et, e3) = trapezoid_with_error(&et, h);
    let kt: Vec<f64> = eta.derivative.iter().zip(tp).map(|(a, b)| a * b).collect();
    let (k, e4) = trapezoid_with_error(&kt, h);
    let orth: Vec<f64> = eta.values.iter().zip(tp).map(|(a, b)| (a - 0.5) * b).collect();
    Ok(MomentTable {
        sigma: 0.5 * i_sq,
        int_theta0p: i_tp,
        int_eta_theta0p: i_et,
        k_eta: k,
        eta_tilde: 0.5 * k,
        eta_orthogonality: trapezoid(&orth, h),
        quad_error: e1.max(e2).max(e3).max(e4),
    })
}

/// Solution of a linearized profile problem.
#[derive(Debug, Clone)]
pub struct LinearizedSolution {
    /// The profile `c` with `c(0) = 0`.
    pub profile: ProfileSolution,
    /// Multiplier of `θ0'` in `c'' − f''(θ0)c + λθ0' = r`.
    pub lambda: f64,
    /// Discrete `<r, θ0'>` before solving.
    pub solvability: f64,
    /// Numerov residual of the solved system, ODE units.
    pub residual: f64,
}

/// Default bound on `|<r, θ0'>|` accepted by [`solve_linearized`].
pub const SOLVABILITY_TOL: f64 = 1e-8;

/// Discrete inner product with trapezoid weights.
pub fn inner(grid: &RhoGrid, a: &[f64], b: &[f64]) -> f64 {
    let w = trapezoid_weights(grid.len(), grid.h());
    a.iter().zip(b).zip(&w).map(|((x, y), z)| x * y * z).sum()
}

/// Removes the `θ0'` component of `u` along `η'`:
/// `P[u] = u − (<u, θ0'>/K) η'`.
pub fn project_out_kernel(theta0: &ProfileSolution, eta: &ProfileSolution, k_eta: f64, u: &[f64]) -> Vec<f64> {
    let a = inner(&theta0.grid, u, &theta0.derivative) / k_eta;
    u.iter().zip(&eta.derivative).map(|(v, e)| v - a * e).collect()
}

/// Solves `c'' − f''(θ0) c + λ θ0' = r`, `c(0) = 0` with the default
/// solvability tolerance.
pub fn solve_linearized(theta0: &ProfileSolution, rhs: &[f64], well: &DoubleWell) -> Result<LinearizedSolution> {
    solve_linearized_with(theta0, rhs, well, SOLVABILITY_TOL)
}

/// As [`solve_linearized`] with an explicit solvability tolerance.
pub fn solve_linearized_with(theta0: &ProfileSolution, rhs: &[f64], well: &DoubleWell, tol: f64) -> Result<LinearizedSolution> {
    let grid = theta0.grid;
    let n = grid.len();
    if rhs.len() != n {
        return Err(Error::GridMismatch("rhs length differs from grid".into()));
    }
    let solv = inner(&grid, rhs, &theta0.derivative);
    if solv.abs() > tol {
        return Err(Error::SolvabilityViolated { inner_product: solv, tolerance: tol });
    }
    let h = grid.h();
    let k = h * h / 12.0;
    let mid = grid.mid();
    let q: Vec<f64> = theta0.values.iter().map(|&t| well.d2f(t)).collect();
    let tp = &theta0.derivative;
    let mut sys = BorderedTridiagonal {
        sub: vec![0.0; n],
        diag: vec![0.0; n],
        sup: vec![0.0; n],
        col: vec![0.0; n],
        row: vec![0.0; n],
        corner: 0.0,
    };
    let mut f = vec![0.0; n];
    for i in 0..n {
        if i == 0 || i == n - 1 {
            sys.diag[i] = -q[i];
            f[i] = rhs[i];
        } else if i == mid {
            sys.diag[i] = 1.0;
        } else {
            sys.sub[i] = 1.0 - k * q[i - 1];
            sys.diag[i] = -2.0 - 10.0 * k * q[i];
            sys.sup[i] = 1.0 - k * q[i + 1];
            sys.col[i] = k * (tp[i - 1] + 10.0 * tp[i] + tp[i + 1]);
            f[i] = k * (rhs[i - 1] + 10.0 * rhs[i] + rhs[i + 1]);
        }
    }
    sys.row[mid - 1] = 1.0 - k * q[mid - 1];
    sys.row[mid] = -2.0 - 10.0 * k * q[mid];
    sys.row[mid + 1] = 1.0 - k * q[mid + 1];
    sys.corner = k * (tp[mid - 1] + 10.0 * tp[mid] + tp[mid + 1]);
    let g = k * (rhs[mid - 1] + 10.0 * rhs[mid] + rhs[mid + 1]);
    let (c, lambda) = sys.solve(&f, g)?;
    let mut residual: f64 = 0.0;
    for i in 1..n - 1 {
        let lhs = (1.0 - k * q[i - 1]) * c[i - 1] + (-2.0 - 10.0 * k * q[i]) * c[i] + (1.0 - k * q[i + 1]) * c[i + 1]
            + lambda * k * (tp[i - 1] + 10.0 * tp[i] + tp[i + 1]);
        let r = k * (rhs[i - 1] + 10.0 * rhs[i] + rhs[i + 1]);
        residual = residual.max((lhs - r).abs() / (h * h));
    }
    let d1 = derivative4(&c, h);
    let d2: Vec<f64> = (0..n).map(|i| q[i] * c[i] + rhs[i] - lambda * tp[i]).collect();
    let far = (-rhs[0] / q[0], -rhs[n - 1] / q[n - 1]);
    Ok(LinearizedSolution { profile: ProfileSolution::assemble(grid, c, d1, d2, far), lambda, solvability: solv, residual })
}

/// Discrete linearized operator `w ↦ D₂w − f''(θ0) w`, where `D₂` is the
/// compact fourth-order second difference. End rows keep only `−f'' w`.
/// For `w(0) = 0`, solving with the output returns `w` and `λ = 0`.
pub fn apply_linearized(theta0: &ProfileSolution, w: &[f64], well: &DoubleWell) -> Result<Vec<f64>> {
    let grid = theta0.grid;
    let n = grid.len();
    if w.len() != n {
        return Err(Error::GridMismatch("input length differs from grid".into()));
    }
    let h = grid.h();
    let q: Vec<f64> = theta0.values.iter().map(|&t| well.d2f(t)).collect();
    let (mut sub, mut diag, mut sup) = (vec![0.0; n], vec![1.0; n], vec![0.0; n]);
    let mut s = vec![0.0; n];
    s[0] = -q[0] * w[0];
    s[n - 1] = -q[n - 1] * w[n - 1];
    for i in 1..n - 1 {
        sub[i] = 1.0 / 12.0;
        diag[i] = 10.0 / 12.0;
        sup[i] = 1.0 / 12.0;
        s[i] = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h) - (q[i - 1] * w[i - 1] + 10.0 * q[i] * w[i] + q[i + 1] * w[i + 1]) / 12.0;
    }
    solve_tridiagonal(&sub, &diag, &sup, &mut s)?;
    Ok(s)
}

/// `θ1`, the solution of `θ1'' − f''(θ0) θ1 = σ − θ0'`, `θ1(0) = 0`.
pub fn solve_theta1(theta0: &ProfileSolution, sigma: f64, well: &DoubleWell) -> Result<LinearizedSolution> {
    let rhs: Vec<f64> = theta0.derivative.iter().map(|d| sigma - d).collect();
    solve_linearized(theta0, &rhs, well)
}

/// `∫ θ1 θ0'² f'''(θ0)`, zero by parity.
pub fn theta1_orthogonality(theta0: &ProfileSolution, theta1: &ProfileSolution, well: &DoubleWell) -> f64 {
    let v: Vec<f64> = (0..theta0.values.len())
        .map(|i| theta1.values[i] * theta0.derivative[i].powi(2) * well.d3f(theta0.values[i]))
        .collect();
    trapezoid(&v, theta0.grid.h())
}

/// Cumulative integral `E(ρ) = ∫_{−L}^{ρ} g` of a tabulated profile with
/// derivative column `g'`, using endpoint-corrected trapezoid cells.
pub fn cumulative(grid: &RhoGrid, g: &[f64], dg: &[f64]) -> ProfileSolution {
    let h = grid.h();
    let n = grid.len();
    let mut e = vec![0.0; n];
    for i in 1..n {
        e[i] = e[i - 1] + 0.5 * h * (g[i - 1] + g[i]) + h * h / 12.0 * (dg[i - 1] - dg[i]);
    }
    let far = (e[0], e[n - 1]);
    ProfileSolution {
        grid: *grid,
        values: e,
        derivative: g.to_vec(),
        second: dg.to_vec(),
        far_field: far,
        decay_rate: f64::INFINITY,
        decay_constant: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> (RhoGrid, DoubleWell, ProfileSolution) {
        let g = RhoGrid::new(16.0, 1001).unwrap();
        let w = DoubleWell::default();
        let t = solve_theta0(&g, &w).unwrap();
        (g, w, t)
    }

    #[test]
    fn step_is_symmetric_and_bounded() {
        for k in 0..=100 {
            let x = k as f64 / 100.0;
            let a = smooth_step(x);
            let b = smooth_step(1.0 - x);
            assert!((a[0] + b[0] - 1.0).abs() < 1e-15);
            assert!(a[1] >= 0.0 && a[1] <= 2.0 + 1e-12);
        }
        assert_eq!(smooth_step(0.5)[0], 0.5);
    }

    #[test]
    fn step_derivatives_match_differences() {
        let h = 1e-6;
        for &x in &[0.05, 0.2, 0.5, 0.71, 0.93] {
            let s = smooth_step(x);
            assert!(((smooth_step(x + h)[0] - smooth_step(x - h)[0]) / (2.0 * h) - s[1]).abs() < 1e-6);
            assert!(((smooth_step(x + h)[1] - smooth_step(x - h)[1]) / (2.0 * h) - s[2]).abs() < 1e-5);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(RhoGrid::new(10.0, 400).is_err());
        assert!(RhoGrid::new(-1.0, 401).is_err());
        let g = RhoGrid::new(4.0, 401).unwrap();
        assert!(matches!(solve_theta0(&g, &DoubleWell::default()), Err(Error::GridTooNarrow { .. })));
    }

    #[test]
    fn profile_is_odd_and_monotone() {
        let (g, _, t) = small();
        let n = g.len();
        for i in 0..n {
            assert!((t.values[i] + t.values[n - 1 - i]).abs() < 1e-13);
        }
        assert!(t.values.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(t.at_origin(), 0.0);
    }

    #[test]
    fn solvability_is_enforced() {
        let (g, w, t) = small();
        let rhs = vec![1.0; g.len()];
        assert!(matches!(solve_linearized(&t, &rhs, &w), Err(Error::SolvabilityViolated { .. })));
    }

    #[test]
    fn apply_then_solve_roundtrips() {
        let (g, w, t) = small();
        let u: Vec<f64> = (0..g.len()).map(|i| {
            let r = g.node(i);
            r * (-r * r / 4.0).exp() + 0.3 * (r / 3.0).tanh()
        }).collect();
        let rhs = apply_linearized(&t, &u, &w).unwrap();
        let sol = solve_linearized(&t, &rhs, &w).unwrap();
        for i in 0..g.len() {
            assert!((sol.profile.values[i] - u[i]).abs() < 1e-9);
        }
        assert!(sol.lambda.abs() < 1e-9);
    }
}
