//! Invariant suites behind the `invariants` subcommand.

use crate::config::ExperimentConfig;
use crate::pipeline::diffuse_run;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sil_core::expansion::{spectral_check, RadialScenario, Side};
use sil_core::geometry::{check_invariants, Circle, CosineMode, Curve, Domain, RadiusLaw, TubularChart};
use sil_core::profiles::{build_eta, compute_moments, solve_theta0, solve_theta1, theta1_orthogonality, RhoGrid};
use sil_core::residuals::{boundary_defect, laplacian4, EvalGrid, ResidualField, Stratum, Which};
use sil_core::sharp::{evolve_sharp, interface_rate, StepControl};
use sil_core::{DoubleWell, Vec2};
use std::time::Instant;

/// Suite names in run order.
pub const SUITES: [&str; 6] = ["profiles", "geometry", "sharp", "expansion", "diffuse", "residuals"];

/// One row of the pass/fail table.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    /// Suite.
    pub suite: &'static str,
    /// Check name.
    pub name: String,
    /// Measured value.
    pub value: f64,
    /// Largest admissible value.
    pub tolerance: f64,
    /// Outcome.
    pub pass: bool,
}

impl Check {
    /// Passes when `value <= tolerance` (NaN fails).
    pub fn at_most(suite: &'static str, name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { suite, name: name.into(), value, tolerance, pass: value <= tolerance }
    }

    /// A stage that could not run.
    pub fn failed(suite: &'static str, name: impl Into<String>) -> Self {
        Self { suite, name: name.into(), value: f64::NAN, tolerance: 0.0, pass: false }
    }
}

/// Fixed-step classical Runge–Kutta for `R' = g(R)`.
pub fn rk4(mut r: f64, t_end: f64, dt: f64, g: impl Fn(f64) -> f64) -> f64 {
    let steps = (t_end / dt).round() as usize;
    let h = t_end / steps as f64;
    for _ in 0..steps {
        let k1 = g(r);
        let k2 = g(r + 0.5 * h * k1);
        let k3 = g(r + 0.5 * h * k2);
        let k4 = g(r + h * k3);
        r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    r
}

fn profiles(cfg: &ExperimentConfig, out: &mut Vec<Check>) {
    const S: &str = "profiles";
    let well = DoubleWell { beta: cfg.beta };
    let grid = match RhoGrid::new(cfg.rho_half_width, cfg.rho_nodes) {
        Ok(g) => g,
        Err(e) => return out.push(Check::failed(S, format!("grid: {e}"))),
    };
    let start = Instant::now();
    let theta0 = match solve_theta0(&grid, &well) {
        Ok(t) => t,
        Err(e) => return out.push(Check::failed(S, format!("theta0: {e}"))),
    };
    // only the overrun is recorded so that the table stays reproducible
    let overrun = (start.elapsed().as_secs_f64() - 1.0).max(0.0);
    out.push(Check::at_most(S, "theta0 runtime beyond 1 s [s]", overrun, 0.0));
    let k = (cfg.beta / 2.0).sqrt();
    let err = (0..grid.len()).map(|i| (theta0.values[i] - (k * grid.node(i)).tanh()).abs()).fold(0.0, f64::max);
    out.push(Check::at_most(S, "max |theta0 - tanh|", err, 1e-8));
    let moments = match compute_moments(&theta0, &build_eta(&grid)) {
        Ok(m) => m,
        Err(e) => return out.push(Check::failed(S, format!("moments: {e}"))),
    };
    out.push(Check::at_most(S, "|sigma - closed form|", (moments.sigma - 2.0 / 3.0 * k).abs(), 1e-7));
    out.push(Check::at_most(S, "|int (eta - 1/2) theta0'|", moments.eta_orthogonality.abs(), 1e-10));
    match solve_theta1(&theta0, moments.sigma, &well) {
        Ok(t1) => {
            out.push(Check::at_most(S, "theta1 solvability", t1.solvability.abs(), 1e-8));
            out.push(Check::at_most(S, "|int theta1 theta0'^2 f'''(theta0)|", theta1_orthogonality(&theta0, &t1.profile, &well).abs(), 1e-7));
        }
        Err(e) => out.push(Check::failed(S, format!("theta1: {e}"))),
    }
}

fn geometry(cfg: &ExperimentConfig, out: &mut Vec<Check>) {
    const S: &str = "geometry";
    let delta = cfg.delta();
    let domain = Domain::Disk { center: Vec2::default(), radius: cfg.r_out };
    let chart = match TubularChart::new(Circle::new(Vec2::default(), cfg.r0), delta, domain, &[0.0]) {
        Ok(c) => c,
        Err(e) => return out.push(Check::failed(S, format!("chart: {e}"))),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pts: Vec<Vec2> = (0..1000)
        .map(|_| {
            let s: f64 = rng.random();
            let d = (2.0 * rng.random::<f64>() - 1.0) * 1.9 * delta;
            chart.curve.point(s, 0.0) + chart.normal(s, 0.0) * d
        })
        .collect();
    let h = CosineMode { amplitude: 0.3, mode: 2.0, growth: 0.5 };
    match check_invariants(&chart, &h, &pts, 0.0, cfg.eps[0]) {
        Ok(r) => {
            out.push(Check::at_most(S, "||grad d| - 1|", r.grad_d_unit, 1e-5));
            out.push(Check::at_most(S, "|grad S . grad d|", r.grad_s_orthogonal, 1e-5));
            out.push(Check::at_most(S, "chain rule", r.chain_rule, 1e-5));
            out.push(Check::at_most(S, "jacobian", r.jacobian, 1e-8));
            out.push(Check::at_most(S, "surface laplacian", r.surface_laplacian, 1e-4));
        }
        Err(e) => out.push(Check::failed(S, format!("invariants: {e}"))),
    }
}

fn sharp(cfg: &ExperimentConfig, out: &mut Vec<Check>) {
    const S: &str = "sharp";
    let sigma = 2.0 / 3.0 * (cfg.beta / 2.0).sqrt();
    let t_end = 0.1;
    match evolve_sharp(cfg.r0, cfg.r_out, sigma, t_end, StepControl::default()) {
        Ok(tr) => {
            let oracle = rk4(cfg.r0, t_end, 1e-6, |r| sigma / (2.0 * r * r * (r / cfg.r_out).ln()));
            out.push(Check::at_most(S, "|R(0.1) - RK4|", (tr.radius(t_end) - oracle).abs(), 1e-8));
            let mono = tr.radii.windows(2).all(|w| w[1] < w[0]);
            out.push(Check::at_most(S, "radius strictly decreasing", if mono { 0.0 } else { 1.0 }, 0.0));
        }
        Err(e) => out.push(Check::failed(S, format!("evolve: {e}"))),
    }
    if cfg.beta == 1.0 && cfg.r0 == 1.0 && cfg.r_out == 2.0 {
        match interface_rate(1.0, 2.0, sigma) {
            Ok(v) => out.push(Check::at_most(S, "|dR/dt(0) + 0.3401|", (v + 0.3401).abs(), 1e-4)),
            Err(e) => out.push(Check::failed(S, format!("rate: {e}"))),
        }
    }
}

fn scenario(cfg: &ExperimentConfig, suite: &'static str, out: &mut Vec<Check>) -> Option<(RadialScenario, sil_core::expansion::Prepared)> {
    let sc = match cfg.scenario() {
        Ok(s) => s,
        Err(e) => {
            out.push(Check::failed(suite, format!("scenario: {e}")));
            return None;
        }
    };
    match sc.prepare() {
        Ok(p) => Some((sc, p)),
        Err(e) => {
            out.push(Check::failed(suite, format!("prepare: {e}")));
            None
        }
    }
}

fn expansion(cfg: &ExperimentConfig, out: &mut Vec<Check>) {
    const S: &str = "expansion";
    let Some((sc, p)) = scenario(cfg, S, out) else { return };
    let eps = cfg.eps[0];
    let f = match sc.field(&p, eps) {
        Ok(f) => f,
        Err(e) => return out.push(Check::failed(S, format!("field: {e}"))),
    };
    let times = [0.0, 0.5 * cfg.t_end, cfg.t_end];
    match boundary_defect(&f, &times, 64) {
        Ok(b) => out.push(Check::at_most(S, "boundary values", b, 1e-12)),
        Err(e) => out.push(Check::failed(S, format!("boundary: {e}"))),
    }
    match spectral_check(&f, &times, 400) {
        Ok(s) => {
            out.push(Check::at_most(S, "C*", s.c_star, 1.0));
            out.push(Check::at_most(S, "pq bound", s.pq_bound, f64::MAX));
        }
        Err(e) => out.push(Check::failed(S, format!("spectral: {e}"))),
    }
    let r = f.radius(0.0);
    let (mp, mm) = (f.outer.mu0(Side::Plus, r, 0.0), f.outer.mu0(Side::Minus, r, 0.0));
    out.push(Check::at_most(S, "c1 solvability", f.profiles.solvability(mp, mm, -1.0 / r).abs(), 1e-8));
    let bound = 10.0 * (-1.3 * f.delta() / (2.0 * eps)).exp() + 2.0 * eps * eps;
    out.push(Check::at_most(S, "matching error / bound", f.matching_error(0.0, 40) / bound, 1.0));
}

fn diffuse(cfg: &ExperimentConfig, out: &mut Vec<Check>) {
    const S: &str = "diffuse";
    let Some((sc, p)) = scenario(cfg, S, out) else { return };
    let eps = cfg.eps[0];
    let run = match sc.field(&p, eps).map_err(|e| e.to_string()).and_then(|f| diffuse_run(cfg, &f, eps).map_err(|e| e.to_string())) {
        Ok(r) => r,
        Err(e) => return out.push(Check::failed(S, format!("run: {e}"))),
    };
    out.push(Check::at_most(S, "energy increases", run.energy_increases(0.0) as f64, 0.0));
    out.push(Check::at_most(S, "boundary rows", run.boundary_defect, 0.0));
    out.push(Check::at_most(S, "mass balance", run.mass_defect, 1e-12));
}

fn residuals(cfg: &ExperimentConfig, out: &mut Vec<Check>) {
    const S: &str = "residuals";
    let f = |x: Vec2| Ok((1.3 * x.x).sin() * (0.7 * x.y).cos());
    let x = Vec2::new(0.3, -0.4);
    let exact = -(1.69 + 0.49) * (1.3f64 * 0.3).sin() * (0.7f64 * -0.4).cos();
    let e1 = (laplacian4(&f, x, 0.1, f(x).unwrap()).unwrap_or(f64::NAN) - exact).abs();
    let e2 = (laplacian4(&f, x, 0.05, f(x).unwrap()).unwrap_or(f64::NAN) - exact).abs();
    out.push(Check::at_most(S, "laplacian stencil order deficit", 3.5 - (e1 / e2).log2(), 0.0));
    let Some((sc, p)) = scenario(cfg, S, out) else { return };
    let grid = EvalGrid { n_r: cfg.eval_nr, n_t: 2, t_end: cfg.t_end };
    match sc.field(&p, cfg.eps[0]).and_then(|fd| ResidualField::evaluate(&fd, Which::Div, &grid)) {
        Ok(r) => out.push(Check::at_most(S, "max |r_div|", r.linf(&Stratum::ALL), 1e-14)),
        Err(e) => out.push(Check::failed(S, format!("r_div: {e}"))),
    }
}

/// Runs the suites named in `filter` (all when `None`).
pub fn run(cfg: &ExperimentConfig, filter: Option<&[String]>) -> Vec<Check> {
    let mut out = Vec::new();
    for suite in SUITES {
        if filter.is_some_and(|f| !f.iter().any(|s| s == suite)) {
            continue;
        }
        match suite {
            "profiles" => profiles(cfg, &mut out),
            "geometry" => geometry(cfg, &mut out),
            "sharp" => sharp(cfg, &mut out),
            "expansion" => expansion(cfg, &mut out),
            "diffuse" => diffuse(cfg, &mut out),
            _ => residuals(cfg, &mut out),
        }
    }
    out
}
