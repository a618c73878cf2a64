//! Residuals of the approximate solution, stratified norms, a dictionary
//! surrogate for the `H¹` dual norm, error norms against a diffuse run,
//! and log–log order fits.

use crate::diffuse::DiffuseRun;
use crate::error::{Error, Result};
use crate::expansion::ApproxField;
use crate::quad::gauss_legendre_panels;
use crate::vec2::Vec2;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

/// Fourth-order central gradient of `f` at `x` with step `h`.
pub fn gradient4<F: Fn(Vec2) -> Result<f64>>(f: &F, x: Vec2, h: f64) -> Result<Vec2> {
    let mut g = [0.0; 2];
    for (axis, gk) in g.iter_mut().enumerate() {
        let e = Vec2::axis(axis) * h;
        *gk = (f(x - e * 2.0)? - 8.0 * f(x - e)? + 8.0 * f(x + e)? - f(x + e * 2.0)?) / (12.0 * h);
    }
    Ok(Vec2::new(g[0], g[1]))
}

/// Fourth-order central Laplacian of `f` at `x` with step `h`; `f0 = f(x)`.
pub fn laplacian4<F: Fn(Vec2) -> Result<f64>>(f: &F, x: Vec2, h: f64, f0: f64) -> Result<f64> {
    let mut s = 0.0;
    for axis in 0..2 {
        let e = Vec2::axis(axis) * h;
        s += -f(x - e * 2.0)? + 16.0 * f(x - e)? - 30.0 * f0 + 16.0 * f(x + e)? - f(x + e * 2.0)?;
    }
    Ok(s / (12.0 * h * h))
}

/// Region of `Ω` a sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stratum {
    /// `Γ(δ)`.
    Interface,
    /// `Γ(2δ) \ Γ(δ)`.
    Transition,
    /// Away from `Γ(2δ)` and from the boundary collar.
    Bulk,
    /// Collar `d_B > −δ`.
    Boundary,
}

impl Stratum {
    /// All strata.
    pub const ALL: [Stratum; 4] = [Stratum::Interface, Stratum::Transition, Stratum::Bulk, Stratum::Boundary];
    /// Bulk and boundary collar together.
    pub const OUTER: [Stratum; 2] = [Stratum::Bulk, Stratum::Boundary];

    /// Short name.
    pub fn name(self) -> &'static str {
        match self {
            Stratum::Interface => "interface",
            Stratum::Transition => "transition",
            Stratum::Bulk => "bulk",
            Stratum::Boundary => "boundary",
        }
    }
}

/// Which residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Which {
    /// `|−Δv_A + ∇p_A − μ_A ∇c_A|`.
    Stokes,
    /// `div v_A`.
    Div,
    /// `∂t c_A + v_A·∇c_A − Δμ_A`.
    Ch1,
    /// `μ_A + εΔc_A − f'(c_A)/ε`.
    Ch2,
}

impl Which {
    /// All residuals.
    pub const ALL: [Which; 4] = [Which::Stokes, Which::Div, Which::Ch1, Which::Ch2];

    /// Short name.
    pub fn name(self) -> &'static str {
        match self {
            Which::Stokes => "r_S",
            Which::Div => "r_div",
            Which::Ch1 => "r_CH1",
            Which::Ch2 => "r_CH2",
        }
    }
}

/// Sampling of space–time for residual norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalGrid {
    /// Minimum samples per stratum and time.
    pub n_r: usize,
    /// Number of sample times (midpoint rule on `(0, T)`).
    pub n_t: usize,
    /// Final time.
    pub t_end: f64,
}

impl EvalGrid {
    /// Sample times and weights.
    pub fn times(&self) -> Vec<(f64, f64)> {
        let w = self.t_end / self.n_t as f64;
        (0..self.n_t).map(|k| ((k as f64 + 0.5) * w, w)).collect()
    }
}

/// Spatial sample with its area weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSample {
    /// Radius.
    pub r: f64,
    /// Angle of the evaluation point.
    pub phi: f64,
    /// `2π r` times the radial quadrature weight.
    pub weight: f64,
    /// Stratum.
    pub stratum: Stratum,
}

/// Finite-difference step used for a field: `ε/16`.
pub fn fd_step(field: &ApproxField) -> f64 {
    field.eps / 16.0
}

/// Stratified Gauss–Legendre samples at time `t`. Panels are at most `ε/8`
/// wide in `Γ(δ)` and `ε/2` elsewhere; the collar stops two stencil steps
/// short of `∂Ω`.
pub fn strata_samples(field: &ApproxField, t: f64, n_r: usize) -> Vec<RadialSample> {
    let (rad, delta, r_out, eps) = (field.radius(t), field.delta(), field.r_out(), field.eps);
    let margin = 2.0 * fd_step(field) * 1.001;
    let pieces: [(Stratum, f64, f64); 7] = [
        (Stratum::Interface, rad - delta, rad + delta),
        (Stratum::Transition, rad - 2.0 * delta, rad - delta),
        (Stratum::Transition, rad + delta, rad + 2.0 * delta),
        (Stratum::Bulk, 0.0, rad - 2.0 * delta),
        (Stratum::Bulk, rad + 2.0 * delta, r_out - delta),
        (Stratum::Boundary, r_out - delta, r_out - margin),
        (Stratum::Boundary, 0.0, 0.0),
    ];
    let mut out = Vec::new();
    let mut k = 0usize;
    for &(stratum, a, b) in &pieces {
        if b <= a {
            continue;
        }
        let parts = pieces.iter().filter(|p| p.0 == stratum && p.2 > p.1).count().max(1);
        let by_count = (n_r as f64 / (4.0 * parts as f64)).ceil() as usize;
        let width = if stratum == Stratum::Interface { eps / 8.0 } else { eps / 2.0 };
        let by_width = ((b - a) / width).ceil() as usize;
        for (r, w) in gauss_legendre_panels(a, b, by_count.max(by_width).max(1)) {
            k += 1;
            out.push(RadialSample { r, phi: 2.399_963_229_728_653 * k as f64, weight: 2.0 * PI * r * w, stratum });
        }
    }
    out
}

/// One residual value with the pieces it was assembled from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualPoint {
    /// Time.
    pub t: f64,
    /// Time weight.
    pub t_weight: f64,
    /// Radius.
    pub r: f64,
    /// Area weight.
    pub weight: f64,
    /// Stratum.
    pub stratum: Stratum,
    /// Residual value (magnitude for the Stokes residual).
    pub value: f64,
    /// `∂t c_A` (Cahn–Hilliard residual only).
    pub dt_c: f64,
    /// `Δμ_A` (Cahn–Hilliard residual only).
    pub lap_mu: f64,
    /// `v_A·∇c_A` (Cahn–Hilliard residual only).
    pub advection: f64,
}

/// Evaluates residual `which` at one point.
pub fn residual_at(field: &ApproxField, which: Which, x: Vec2, t: f64) -> Result<(f64, [f64; 3])> {
    let h = fd_step(field);
    if x.norm() + 2.0 * h > field.r_out() * (1.0 + 1e-12) {
        return Err(Error::StencilOutOfDomain { radius: x.norm() });
    }
    let eps = field.eps;
    let c = |y: Vec2| field.c(y, t);
    let mu = |y: Vec2| field.mu(y, t);
    let v1 = |y: Vec2| Ok(field.eval(y, t)?.v.x);
    let v2 = |y: Vec2| Ok(field.eval(y, t)?.v.y);
    let s = field.eval(x, t)?;
    Ok(match which {
        Which::Ch2 => {
            let lap = laplacian4(&c, x, h, s.c)?;
            (s.mu + eps * lap - field.profiles.well.df(s.c) / eps, [0.0; 3])
        }
        Which::Ch1 => {
            let k = 1e-4 * eps;
            let dt_c = (field.c(x, t + k)? - field.c(x, t - k)?) / (2.0 * k);
            let lap_mu = laplacian4(&mu, x, h, s.mu)?;
            let adv = s.v.dot(gradient4(&c, x, h)?);
            (dt_c + adv - lap_mu, [dt_c, lap_mu, adv])
        }
        Which::Div => {
            let a = gradient4(&v1, x, h)?;
            let b = gradient4(&v2, x, h)?;
            (a.x + b.y, [0.0; 3])
        }
        Which::Stokes => {
            let p = |y: Vec2| Ok(field.eval(y, t)?.p);
            let gp = gradient4(&p, x, h)?;
            let gc = gradient4(&c, x, h)?;
            let lv = Vec2::new(laplacian4(&v1, x, h, s.v.x)?, laplacian4(&v2, x, h, s.v.y)?);
            ((-lv + gp - gc * s.mu).norm(), [0.0; 3])
        }
    })
}

/// Residual `which` at the stratified samples of time `t`.
pub fn eval_residual(field: &ApproxField, which: Which, n_r: usize, t: f64, t_weight: f64) -> Result<Vec<ResidualPoint>> {
    strata_samples(field, t, n_r)
        .into_iter()
        .map(|sm| {
            let (value, parts) = residual_at(field, which, Vec2::polar(sm.r, sm.phi), t)?;
            Ok(ResidualPoint { t, t_weight, r: sm.r, weight: sm.weight, stratum: sm.stratum, value, dt_c: parts[0], lap_mu: parts[1], advection: parts[2] })
        })
        .collect()
}

/// Residual values over the whole space–time sampling.
#[derive(Debug, Clone)]
pub struct ResidualField {
    /// Which residual.
    pub which: Which,
    /// Samples.
    pub points: Vec<ResidualPoint>,
}

impl ResidualField {
    /// Evaluates over all times of `grid`.
    pub fn evaluate(field: &ApproxField, which: Which, grid: &EvalGrid) -> Result<Self> {
        let mut points = Vec::new();
        for (t, w) in grid.times() {
            points.extend(eval_residual(field, which, grid.n_r, t, w)?);
        }
        Ok(Self { which, points })
    }

    /// `max |r|` over `strata`.
    pub fn linf(&self, strata: &[Stratum]) -> f64 {
        self.points.iter().filter(|p| strata.contains(&p.stratum)).map(|p| p.value.abs()).fold(0.0, f64::max)
    }

    /// `‖r‖_{L²(0,T; L²(strata))}`.
    pub fn l2(&self, strata: &[Stratum]) -> f64 {
        self.points.iter().filter(|p| strata.contains(&p.stratum)).map(|p| p.t_weight * p.weight * p.value * p.value).sum::<f64>().sqrt()
    }

    /// Dictionary norm `max_φ ∫_0^T |∫_Ω r φ| dt / ‖φ‖_{H¹}`.
    pub fn weak(&self, dict: &Dictionary) -> f64 {
        let mut times: Vec<f64> = self.points.iter().map(|p| p.t).collect();
        times.dedup();
        dict.elements
            .iter()
            .zip(&dict.h1_norms)
            .map(|(phi, nrm)| {
                let mut total = 0.0;
                for &t in &times {
                    let mut acc = 0.0;
                    let mut tw = 0.0;
                    for p in self.points.iter().filter(|p| p.t == t) {
                        acc += p.weight * p.value * phi.angular_mean(p.r);
                        tw = p.t_weight;
                    }
                    total += tw * acc.abs();
                }
                total / nrm
            })
            .fold(0.0, f64::max)
    }
}

/// Test function in the weak-norm dictionary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    /// `1`.
    One,
    /// `x₁^a x₂^b`.
    Monomial(u32, u32),
    /// `exp(−|x|²/(2s²))`.
    Gaussian(f64),
}

impl TestFunction {
    /// Value at `x`.
    pub fn value(&self, x: Vec2) -> f64 {
        match *self {
            TestFunction::One => 1.0,
            TestFunction::Monomial(a, b) => x.x.powi(a as i32) * x.y.powi(b as i32),
            TestFunction::Gaussian(s) => (-x.norm2() / (2.0 * s * s)).exp(),
        }
    }

    /// Gradient at `x`.
    pub fn gradient(&self, x: Vec2) -> Vec2 {
        match *self {
            TestFunction::One => Vec2::default(),
            TestFunction::Monomial(a, b) => {
                let gx = if a == 0 { 0.0 } else { a as f64 * x.x.powi(a as i32 - 1) * x.y.powi(b as i32) };
                let gy = if b == 0 { 0.0 } else { b as f64 * x.x.powi(a as i32) * x.y.powi(b as i32 - 1) };
                Vec2::new(gx, gy)
            }
            TestFunction::Gaussian(s) => x * (-self.value(x) / (s * s)),
        }
    }

    /// `(1/2π) ∫ φ(r, θ) dθ` by the 32-point trapezoid rule.
    pub fn angular_mean(&self, r: f64) -> f64 {
        (0..32).map(|k| self.value(Vec2::polar(r, 2.0 * PI * k as f64 / 32.0))).sum::<f64>() / 32.0
    }
}

/// Finite family of test functions with precomputed `H¹(Ω)` norms on the
/// disk of radius `r_out`.
#[derive(Debug, Clone)]
pub struct Dictionary {
    /// Test functions.
    pub elements: Vec<TestFunction>,
    /// Their `H¹` norms.
    pub h1_norms: Vec<f64>,
}

impl Dictionary {
    /// Builds a dictionary from explicit elements.
    pub fn new(r_out: f64, elements: Vec<TestFunction>) -> Self {
        let quad = gauss_legendre_panels(0.0, r_out, 32);
        let h1_norms = elements
            .iter()
            .map(|phi| {
                let mut acc = 0.0;
                for &(r, w) in &quad {
                    for k in 0..64 {
                        let x = Vec2::polar(r, 2.0 * PI * k as f64 / 64.0);
                        acc += w * r * (2.0 * PI / 64.0) * (phi.value(x).powi(2) + phi.gradient(x).norm2());
                    }
                }
                acc.sqrt()
            })
            .collect();
        Self { elements, h1_norms }
    }

    /// `{1, x₁, x₂, x₁², x₁x₂, x₂²}` and three centred Gaussians of widths
    /// `R_out/8`, `R_out/4`, `R_out/2`.
    pub fn standard(r_out: f64) -> Self {
        use TestFunction::*;
        Self::new(
            r_out,
            alloc::vec![
                One,
                Monomial(1, 0),
                Monomial(0, 1),
                Monomial(2, 0),
                Monomial(1, 1),
                Monomial(0, 2),
                Gaussian(r_out / 8.0),
                Gaussian(r_out / 4.0),
                Gaussian(r_out / 2.0),
            ],
        )
    }
}

/// `max |c_A + 1| + |μ_A|` on `∂Ω` at the given times.
pub fn boundary_defect(field: &ApproxField, times: &[f64], n_angles: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &t in times {
        for k in 0..n_angles {
            let x = Vec2::polar(field.r_out(), 2.0 * PI * k as f64 / n_angles as f64);
            let s = field.eval(x, t)?;
            worst = worst.max((s.c + 1.0).abs()).max(s.mu.abs());
        }
    }
    Ok(worst)
}

/// Least-squares fit `log y = slope · log ε + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFit {
    /// Observed order.
    pub slope: f64,
    /// Intercept of the log–log line.
    pub intercept: f64,
    /// RMS deviation of the points from the line (in log units).
    pub residual: f64,
}

/// Fits the convergence order of `norms` against `eps`.
pub fn fit_order(eps: &[f64], norms: &[f64]) -> Result<OrderFit> {
    if eps.len() != norms.len() || eps.len() < 2 {
        return Err(Error::DegenerateFit("need at least two matching points"));
    }
    if eps.iter().chain(norms).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::DegenerateFit("values must be positive and finite"));
    }
    let xs: Vec<f64> = eps.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateFit("all eps equal"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum::<f64>() / n).sqrt();
    Ok(OrderFit { slope, intercept, residual })
}

/// Norms of `R = c^ε − c_A` over a diffuse run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorNorms {
    /// `‖R‖_{L²(0,T;L²)}`; the tangential gradient term vanishes for radial data.
    pub main1: f64,
    /// `ε‖∇R‖ + ‖R‖` in `L²(0,T;L²(Ω∖Γ(δ)))`.
    pub main2: f64,
    /// `ε^{3/2} ‖∂_n R‖_{L²(0,T;L²(Γ(δ)))}`.
    pub main3: f64,
    /// `sup_t` of the dictionary dual norm of `R(t)`.
    pub dual_sup: f64,
    /// `∫∫ ε|∇R|² + f''(c_A) R²/ε` (may be negative).
    pub main4: f64,
    /// `sup_t ‖γR‖ + ε^{1/2}‖γΔR‖_{L²(0,T;L²)}`, `γ = ξ(4 d_B)`.
    pub main5: f64,
    /// `‖γ∇R‖_{L²(0,T;L²)}`.
    pub main6: f64,
    /// `sup_t |R_ε(t) − R(t)|` over accepted steps.
    pub sup_radius: f64,
    /// `∫∫ r_CH2 R`.
    pub paired_rch2: f64,
}

/// Compares a diffuse run with the approximate solution at its snapshots.
pub fn error_norms(run: &DiffuseRun, field: &ApproxField, dict: &Dictionary) -> Result<ErrorNorms> {
    if (run.params.eps - field.eps).abs() > 1e-14 * field.eps {
        return Err(Error::GridMismatch(String::from("run and field use different eps")));
    }
    if (run.grid.r_out() - field.r_out()).abs() > 1e-12 {
        return Err(Error::GridMismatch(String::from("run and field use different domains")));
    }
    let snaps = &run.snapshots;
    if snaps.len() < 2 {
        return Err(Error::InvalidInput(String::from("need at least two snapshots")));
    }
    let g = &run.grid;
    let n = g.intervals();
    let h = g.h();
    let eps = field.eps;
    let delta = field.delta();
    let well = field.profiles.well;
    let two_pi = 2.0 * PI;
    let hx = fd_step(field);
    let mut out = ErrorNorms::default();
    let (mut s1, mut s2, mut s3, mut s4, mut s5, mut s6, mut paired) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, st) in snaps.iter().enumerate() {
        let tw = if k == 0 {
            0.5 * (snaps[1].t - snaps[0].t)
        } else if k == snaps.len() - 1 {
            0.5 * (snaps[k].t - snaps[k - 1].t)
        } else {
            0.5 * (snaps[k + 1].t - snaps[k - 1].t)
        };
        let t = st.t;
        let rad = field.radius(t);
        let ca: Vec<f64> = (0..=n).map(|i| field.c(Vec2::new(g.r(i), 0.0), t)).collect::<Result<_>>()?;
        let res: Vec<f64> = (0..=n).map(|i| st.c[i] - ca[i]).collect();
        let grad: Vec<f64> = (0..=n)
            .map(|i| {
                if i == 0 {
                    0.0
                } else if i == n {
                    (res[n] - res[n - 1]) / h
                } else {
                    (res[i + 1] - res[i - 1]) / (2.0 * h)
                }
            })
            .collect();
        let mut l2_now = 0.0;
        for i in 0..=n {
            let r = g.r(i);
            let w = two_pi * g.volume(i);
            let inside = (r - rad).abs() < delta;
            s1 += tw * w * res[i] * res[i];
            if inside {
                s3 += tw * w * grad[i] * grad[i];
            } else {
                s2 += tw * w * (eps * grad[i].abs() + res[i].abs()).powi(2);
            }
            s4 += tw * w * (eps * grad[i] * grad[i] + well.d2f(ca[i]) * res[i] * res[i] / eps);
            let gamma = crate::geometry::xi(4.0 * (r - g.r_out()), delta)[0];
            l2_now += w * (gamma * res[i]).powi(2);
            if i < n {
                let lap_r = if i == 0 {
                    4.0 * (res[1] - res[0]) / (h * h)
                } else {
                    (g.face(i) * (res[i + 1] - res[i]) - g.face(i - 1) * (res[i] - res[i - 1])) / (h * g.volume(i))
                };
                s5 += tw * w * (gamma * lap_r).powi(2);
            }
            s6 += tw * w * (gamma * grad[i]).powi(2);
            if r + 2.0 * hx <= g.r_out() {
                let (r2, _) = residual_at(field, Which::Ch2, Vec2::new(r, 0.0), t)?;
                paired += tw * w * r2 * res[i];
            }
        }
        out.main5 = out.main5.max(l2_now.sqrt());
        let dual = dict
            .elements
            .iter()
            .zip(&dict.h1_norms)
            .map(|(phi, nrm)| (0..=n).map(|i| two_pi * g.volume(i) * res[i] * phi.angular_mean(g.r(i))).sum::<f64>().abs() / nrm)
            .fold(0.0, f64::max);
        out.dual_sup = out.dual_sup.max(dual);
    }
    out.main1 = s1.sqrt();
    out.main2 = s2.sqrt();
    out.main3 = eps.powf(1.5) * s3.sqrt();
    out.main4 = s4;
    out.main5 += eps.sqrt() * s5.sqrt();
    out.main6 = s6.sqrt();
    out.paired_rch2 = paired;
    out.sup_radius = run.history.iter().map(|row| (row.radius - field.radius(row.t)).abs()).fold(0.0, f64::max);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_power_law() {
        let eps = [0.16, 0.08, 0.04, 0.02];
        let y: Vec<f64> = eps.iter().map(|e| 3.0 * e * e).collect();
        let f = fit_order(&eps, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && f.residual < 1e-12);
        assert!(fit_order(&eps, &[1.0, 0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn stencils_are_fourth_order() {
        let f = |x: Vec2| Ok((1.3 * x.x).sin() * (0.7 * x.y).cos());
        let x = Vec2::new(0.3, -0.4);
        let exact_lap = -(1.69 + 0.49) * f(x).unwrap();
        let exact_gx = 1.3 * (1.3 * x.x).cos() * (0.7 * x.y).cos();
        let errs: Vec<(f64, f64)> = [0.1, 0.05]
            .iter()
            .map(|&h| {
                let l = laplacian4(&f, x, h, f(x).unwrap()).unwrap();
                let g = gradient4(&f, x, h).unwrap();
                ((l - exact_lap).abs(), (g.x - exact_gx).abs())
            })
            .collect();
        assert!((errs[0].0 / errs[1].0).log2() >= 3.5);
        assert!((errs[0].1 / errs[1].1).log2() >= 3.5);
    }
}
