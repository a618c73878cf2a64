//! Radially symmetric Cahn–Hilliard solver on a disk with `c = −1`,
//! `μ = 0` at `r = R_out`.
//!
//! Finite volumes on nodes `r_i = i h`: cell `[r_i − h/2, r_i + h/2]`, the
//! centre cell `[0, h/2]` with volume `h²/8` (the usual ghost-node rule at
//! `r = 0`). The discrete energy
//! `E = Σ r_{i+½} (ε/2)(c_{i+1} − c_i)²/h + Σ V_i f(c_i)/ε` has gradient
//! `V_i μ_i`, so implicit Euler dissipates it whenever Newton converges.

use crate::error::{Error, Result};
use crate::linalg::BandMatrix;
use crate::potential::DoubleWell;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Uniform radial grid `r_i = i h`, `i = 0..=n`, `h = R_out/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    r_out: f64,
    n: usize,
}

impl RadialGrid {
    /// Grid with `n` intervals.
    pub fn new(r_out: f64, n: usize) -> Result<Self> {
        if !(r_out > 0.0) || n < 4 {
            return Err(Error::InvalidInput("radial grid needs R_out > 0 and n >= 4".into()));
        }
        Ok(Self { r_out, n })
    }

    /// Grid with `h ≤ ε/8`.
    pub fn for_eps(r_out: f64, eps: f64) -> Result<Self> {
        Self::new(r_out, (8.0 * r_out / eps - 1e-9).ceil() as usize)
    }

    /// Number of intervals.
    pub fn intervals(&self) -> usize {
        self.n
    }

    /// Outer radius.
    pub fn r_out(&self) -> f64 {
        self.r_out
    }

    /// Spacing.
    pub fn h(&self) -> f64 {
        self.r_out / self.n as f64
    }

    /// Node radius.
    pub fn r(&self, i: usize) -> f64 {
        i as f64 * self.h()
    }

    /// Face radius `r_{i+½}`.
    pub fn face(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h()
    }

    /// Control volume of node `i` (per unit angle).
    pub fn volume(&self, i: usize) -> f64 {
        let h = self.h();
        if i == 0 {
            h * h / 8.0
        } else if i == self.n {
            0.5 * h * self.r_out - h * h / 8.0
        } else {
            self.r(i) * h
        }
    }

    /// Fails unless `h ≤ ε/8`.
    pub fn check_resolution(&self, eps: f64) -> Result<()> {
        let limit = eps / 8.0;
        if self.h() > limit * (1.0 + 1e-9) {
            Err(Error::ResolutionTooCoarse { h: self.h(), limit })
        } else {
            Ok(())
        }
    }
}

/// Nodal values at one time. Node `n` holds the boundary values.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialState {
    /// Time.
    pub t: f64,
    /// `c_i`.
    pub c: Vec<f64>,
    /// `μ_i`.
    pub mu: Vec<f64>,
}

/// Solver parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffuseParams {
    /// Interface width.
    pub eps: f64,
    /// Potential.
    pub well: DoubleWell,
    /// First step.
    pub dt0: f64,
    /// Largest step.
    pub dt_max: f64,
    /// Newton residual tolerance (intensive units).
    pub newton_tol: f64,
    /// Newton iteration cap.
    pub max_newton: usize,
    /// Step halvings before giving up.
    pub max_halvings: usize,
}

impl DiffuseParams {
    /// `dt0 = 10ε³`, `dt_max = min(10ε³, T/400)`.
    pub fn for_eps(eps: f64, t_end: f64) -> Self {
        let dt = (10.0 * eps * eps * eps).min(t_end / 400.0);
        Self { eps, well: DoubleWell::default(), dt0: dt, dt_max: dt, newton_tol: 1e-10, max_newton: 12, max_halvings: 20 }
    }
}

/// Discrete `L_h u` at interior node `i < n`.
fn lap(grid: &RadialGrid, u: &[f64], i: usize) -> f64 {
    let h = grid.h();
    let right = grid.face(i) * (u[i + 1] - u[i]);
    let left = if i == 0 { 0.0 } else { grid.face(i - 1) * (u[i] - u[i - 1]) };
    (right - left) / (h * grid.volume(i))
}

/// Discrete chemical potential `−ε L_h c + f'(c)/ε`; zero at the boundary.
pub fn chemical_potential(grid: &RadialGrid, c: &[f64], eps: f64, well: &DoubleWell) -> Vec<f64> {
    let n = grid.intervals();
    let mut mu: Vec<f64> = (0..n).map(|i| -eps * lap(grid, c, i) + well.df(c[i]) / eps).collect();
    mu.push(0.0);
    mu
}

/// Discrete Ginzburg–Landau energy (per unit angle).
pub fn energy(grid: &RadialGrid, c: &[f64], eps: f64, well: &DoubleWell) -> f64 {
    let n = grid.intervals();
    let h = grid.h();
    let grad: f64 = (0..n).map(|i| grid.face(i) * (c[i + 1] - c[i]).powi(2)).sum::<f64>() * 0.5 * eps / h;
    let bulk: f64 = (0..=n).map(|i| grid.volume(i) * well.f(c[i])).sum::<f64>() / eps;
    grad + bulk
}

/// `Σ_{i<n} V_i c_i` (per unit angle).
pub fn mass(grid: &RadialGrid, c: &[f64]) -> f64 {
    (0..grid.intervals()).map(|i| grid.volume(i) * c[i]).sum()
}

/// Flux `r_{n−½} (μ_n − μ_{n−1}) / h` through the last face.
pub fn boundary_flux(grid: &RadialGrid, mu: &[f64]) -> f64 {
    let n = grid.intervals();
    grid.face(n - 1) * (mu[n] - mu[n - 1]) / grid.h()
}

impl RadialState {
    /// State from a radial profile `c(r)` with consistent `μ`; boundary
    /// values are imposed exactly.
    pub fn from_profile(grid: &RadialGrid, t: f64, eps: f64, well: &DoubleWell, c_of_r: impl Fn(f64) -> f64) -> Self {
        let n = grid.intervals();
        let mut c: Vec<f64> = (0..=n).map(|i| c_of_r(grid.r(i))).collect();
        c[n] = -1.0;
        let mu = chemical_potential(grid, &c, eps, well);
        Self { t, c, mu }
    }
}

/// Newton diagnostics of an accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    /// Step actually taken.
    pub dt: f64,
    /// Newton iterations.
    pub iterations: usize,
    /// Halvings needed.
    pub halvings: usize,
    /// Final residual.
    pub residual: f64,
}

fn newton(grid: &RadialGrid, old: &RadialState, dt: f64, p: &DiffuseParams) -> Option<(RadialState, usize, f64)> {
    let n = grid.intervals();
    let h = grid.h();
    let eps = p.eps;
    let mut c = old.c.clone();
    let mut mu = old.mu.clone();
    c[n] = -1.0;
    mu[n] = 0.0;
    let mut jac = BandMatrix::zeros(2 * n, 3, 3);
    let mut f = vec![0.0; 2 * n];
    for it in 0..=p.max_newton {
        let mut res: f64 = 0.0;
        for i in 0..n {
            f[2 * i] = c[i] - old.c[i] - dt * lap(grid, &mu, i);
            f[2 * i + 1] = mu[i] + eps * lap(grid, &c, i) - p.well.df(c[i]) / eps;
            res = res.max(f[2 * i].abs()).max(f[2 * i + 1].abs());
        }
        if !res.is_finite() {
            return None;
        }
        if res <= p.newton_tol {
            return Some((RadialState { t: old.t + dt, c, mu }, it, res));
        }
        if it == p.max_newton {
            return None;
        }
        jac.clear();
        for i in 0..n {
            let v = grid.volume(i);
            let wr = grid.face(i) / (h * v);
            let wl = if i == 0 { 0.0 } else { grid.face(i - 1) / (h * v) };
            let (rc, rm) = (2 * i, 2 * i + 1);
            jac.add(rc, rc, 1.0);
            jac.add(rc, rm, dt * (wr + wl));
            if i > 0 {
                jac.add(rc, 2 * i - 1, -dt * wl);
                jac.add(rm, 2 * i - 2, eps * wl);
            }
            if i + 1 < n {
                jac.add(rc, 2 * i + 3, -dt * wr);
                jac.add(rm, 2 * i + 2, eps * wr);
            }
            jac.add(rm, rm, 1.0);
            jac.add(rm, rc, -eps * (wr + wl) - p.well.d2f(c[i]) / eps);
        }
        let lu = jac.clone().factor().ok()?;
        for v in f.iter_mut() {
            *v = -*v;
        }
        lu.solve(&mut f);
        let mut step: f64 = 0.0;
        for i in 0..n {
            c[i] += f[2 * i];
            mu[i] += f[2 * i + 1];
            step = step.max(f[2 * i].abs());
        }
        if step < 1e-14 && it > 0 {
            // update at round-off level
            return Some((RadialState { t: old.t + dt, c, mu }, it + 1, res));
        }
    }
    None
}

/// One implicit Euler step of size `dt`, halved on Newton failure.
pub fn step(grid: &RadialGrid, state: &RadialState, dt: f64, p: &DiffuseParams) -> Result<(RadialState, StepInfo)> {
    let mut dt_try = dt;
    for halvings in 0..=p.max_halvings {
        if let Some((s, iterations, residual)) = newton(grid, state, dt_try, p) {
            return Ok((s, StepInfo { dt: dt_try, iterations, halvings, residual }));
        }
        dt_try *= 0.5;
    }
    Err(Error::StepFailed { time: state.t, dt: dt_try })
}

/// Radius of the single sign change of `c`, by linear interpolation.
pub fn interface_radius(grid: &RadialGrid, c: &[f64]) -> Result<f64> {
    let mut found = None;
    let mut count = 0;
    for i in 0..grid.intervals() {
        let (a, b) = (c[i], c[i + 1]);
        if (a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0) {
            if b == 0.0 && i + 1 < grid.intervals() && c[i + 2] * a > 0.0 {
                continue;
            }
            count += 1;
            found = Some(grid.r(i) + grid.h() * a / (a - b));
        }
    }
    match (count, found) {
        (0, _) => Err(Error::NoInterface),
        (1, Some(r)) => Ok(r),
        (k, _) => Err(Error::MultipleInterfaces { count: k }),
    }
}

/// One accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRow {
    /// Time after the step.
    pub t: f64,
    /// Diffuse interface radius.
    pub radius: f64,
    /// Energy.
    pub energy: f64,
    /// Interior mass `Σ V_i c_i`.
    pub mass: f64,
    /// Step size.
    pub dt: f64,
    /// Newton iterations.
    pub iterations: usize,
}

/// Full run.
#[derive(Debug, Clone)]
pub struct DiffuseRun {
    /// Grid.
    pub grid: RadialGrid,
    /// Parameters.
    pub params: DiffuseParams,
    /// One row per accepted step, starting with the initial state.
    pub history: Vec<HistoryRow>,
    /// States at the requested snapshot times.
    pub snapshots: Vec<RadialState>,
    /// Halvings over the whole run.
    pub halvings: usize,
    /// Largest `|c_n + 1| + |μ_n|` seen.
    pub boundary_defect: f64,
    /// Largest violation of `ΔM = dt · flux` over all steps.
    pub mass_defect: f64,
}

impl DiffuseRun {
    /// Number of accepted steps whose energy exceeds the previous one by more
    /// than `tol` (relative).
    pub fn energy_increases(&self, tol: f64) -> usize {
        self.history.windows(2).filter(|w| w[1].energy > w[0].energy + tol * w[0].energy.abs().max(1.0)).count()
    }
}

/// Integrates from `init` to `t_end`, landing exactly on each snapshot
/// time (which must lie in `[init.t, t_end]`).
pub fn run(grid: &RadialGrid, init: RadialState, p: &DiffuseParams, t_end: f64, snapshot_times: &[f64]) -> Result<DiffuseRun> {
    grid.check_resolution(p.eps)?;
    let n = grid.intervals();
    if init.c.len() != n + 1 || init.mu.len() != n + 1 {
        return Err(Error::GridMismatch("state length differs from grid".into()));
    }
    let mut targets: Vec<f64> = snapshot_times.iter().copied().filter(|&t| t >= init.t && t <= t_end).collect();
    targets.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let mut out = DiffuseRun { grid: *grid, params: *p, history: Vec::new(), snapshots: Vec::new(), halvings: 0, boundary_defect: 0.0, mass_defect: 0.0 };
    let record = |s: &RadialState, dt: f64, it: usize| -> Result<HistoryRow> {
        Ok(HistoryRow { t: s.t, radius: interface_radius(grid, &s.c)?, energy: energy(grid, &s.c, p.eps, &p.well), mass: mass(grid, &s.c), dt, iterations: it })
    };
    let mut state = init;
    out.history.push(record(&state, 0.0, 0)?);
    let mut next = 0;
    while next < targets.len() && targets[next] <= state.t + 1e-14 {
        out.snapshots.push(state.clone());
        next += 1;
    }
    let mut dt = p.dt0.min(p.dt_max);
    while state.t < t_end - 1e-14 {
        let goal = if next < targets.len() { targets[next] } else { t_end };
        let want = dt.min(goal - state.t);
        let (s, info) = step(grid, &state, want, p)?;
        out.halvings += info.halvings;
        out.boundary_defect = out.boundary_defect.max((s.c[n] + 1.0).abs() + s.mu[n].abs());
        let dm = mass(grid, &s.c) - mass(grid, &state.c) - info.dt * boundary_flux(grid, &s.mu);
        out.mass_defect = out.mass_defect.max(dm.abs());
        out.history.push(record(&s, info.dt, info.iterations)?);
        if info.halvings > 0 {
            dt = info.dt;
        } else if info.iterations <= 3 && (want - dt).abs() <= 1e-15 {
            dt = (dt * 1.5).min(p.dt_max);
        }
        state = s;
        while next < targets.len() && (targets[next] - state.t).abs() <= 1e-12 {
            state.t = targets[next];
            out.snapshots.push(state.clone());
            next += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volumes_tile_the_disk() {
        let g = RadialGrid::new(2.0, 37).unwrap();
        let total: f64 = (0..=37).map(|i| g.volume(i)).sum();
        assert!((total - 2.0).abs() < 1e-13); // ∫_0^2 r dr
    }

    #[test]
    fn laplacian_exact_on_quadratics() {
        let g = RadialGrid::new(1.0, 50).unwrap();
        let u: Vec<f64> = (0..=50).map(|i| g.r(i).powi(2)).collect();
        for i in 0..50 {
            assert!((lap(&g, &u, i) - 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn resolution_rule() {
        let g = RadialGrid::new(2.0, 100).unwrap();
        assert!(g.check_resolution(0.1).is_err());
        assert!(RadialGrid::for_eps(2.0, 0.1).unwrap().check_resolution(0.1).is_ok());
    }

    #[test]
    fn interface_detection() {
        let g = RadialGrid::new(2.0, 20).unwrap();
        let c: Vec<f64> = (0..=20).map(|i| 1.0 - g.r(i)).collect();
        assert!((interface_radius(&g, &c).unwrap() - 1.0).abs() < 1e-12);
        let bad: Vec<f64> = (0..=20).map(|i| (3.0 * g.r(i)).cos()).collect();
        assert!(matches!(interface_radius(&g, &bad), Err(Error::MultipleInterfaces { .. })));
        assert!(matches!(interface_radius(&g, &vec![-1.0; 21]), Err(Error::NoInterface)));
    }
}
