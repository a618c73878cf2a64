//! Matched asymptotic approximate solution for a shrinking circular drop.
//!
//! Outer terms live on either side of the interface, inner terms are
//! functions of the stretched variable `ρ = d_Γ/ε`, and boundary-layer
//! terms sit in a collar of `∂Ω`. They are glued with the cutoff `ξ`:
//!
//! ```text
//! c_A = ξ(d_Γ) c_I + (1 − ξ(d_Γ))(1 − ξ(2 d_B)) c_O + ξ(2 d_B) c_B
//! ```
//!
//! and likewise for `μ_A`, `p_A`. The fluid is at rest, `v_A ≡ 0`, and the
//! interface height correction vanishes, `h_A ≡ 0`.

use crate::error::{Error, Result};
use crate::geometry::{xi, Circle, Domain, RadiusLaw, TubularChart};
use crate::potential::DoubleWell;
use crate::profiles::{
    build_eta, compute_moments, cumulative, eta, inner, project_out_kernel, solve_linearized, solve_theta0, solve_theta1,
    LinearizedSolution, MomentTable, ProfileSolution, RhoGrid,
};
use crate::quad::HermiteTable;
use crate::sharp::{evolve_sharp, mu_inside, mu_outside, radial_pressure, SharpTrajectory, StepControl};
use crate::vec2::Vec2;
use alloc::sync::Arc;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Side of the interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Inside, `c ≈ +1`.
    Plus,
    /// Outside, `c ≈ −1`.
    Minus,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// Every one-dimensional profile the expansion needs, solved once.
#[derive(Debug, Clone)]
pub struct InnerProfiles {
    /// Potential.
    pub well: DoubleWell,
    /// Moments of `θ0` and `η`.
    pub moments: MomentTable,
    /// `θ0`.
    pub theta0: ProfileSolution,
    /// `η`.
    pub eta: ProfileSolution,
    /// `θ1` with `θ1'' − f''θ1 = σ − θ0'`.
    pub theta1: LinearizedSolution,
    /// Response to `−P[1]`.
    pub phi_one: LinearizedSolution,
    /// Response to `−P[η]`.
    pub phi_eta: LinearizedSolution,
    /// Response to `−P[θ0']`.
    pub phi_theta: LinearizedSolution,
    /// `E(ρ) = ∫_{−L}^{ρ} η θ0'`.
    pub eta_mass: ProfileSolution,
    tables: [HermiteTable; 5],
}

impl InnerProfiles {
    /// Solves all profile problems on `grid`.
    pub fn build(grid: &RhoGrid, well: DoubleWell) -> Result<Self> {
        let theta0 = solve_theta0(grid, &well)?;
        let eta_p = build_eta(grid);
        let moments = compute_moments(&theta0, &eta_p)?;
        let theta1 = solve_theta1(&theta0, moments.sigma, &well)?;
        let basis = |u: &[f64]| -> Result<LinearizedSolution> {
            let p: Vec<f64> = project_out_kernel(&theta0, &eta_p, moments.k_eta, u).into_iter().map(|v| -v).collect();
            solve_linearized(&theta0, &p, &well)
        };
        let ones = alloc::vec![1.0; grid.len()];
        let phi_one = basis(&ones)?;
        let phi_eta = basis(&eta_p.values)?;
        let phi_theta = basis(&theta0.derivative)?;
        let n = grid.len();
        let g: Vec<f64> = (0..n).map(|i| eta_p.values[i] * theta0.derivative[i]).collect();
        let dg: Vec<f64> = (0..n)
            .map(|i| eta_p.derivative[i] * theta0.derivative[i] + eta_p.values[i] * theta0.second[i])
            .collect();
        let eta_mass = cumulative(grid, &g, &dg);
        let tables = [theta0.table(), phi_one.profile.table(), phi_eta.profile.table(), phi_theta.profile.table(), eta_mass.table()];
        Ok(Self { well, moments, theta0, eta: eta_p, theta1, phi_one, phi_eta, phi_theta, eta_mass, tables })
    }

    /// `σ`.
    pub fn sigma(&self) -> f64 {
        self.moments.sigma
    }

    /// `θ0(ρ)`.
    pub fn theta0_at(&self, rho: f64) -> f64 {
        self.tables[0].eval(rho)
    }

    /// `c1(ρ)` for local outer data `μ0±` and `Δd_Γ`.
    pub fn c1_at(&self, rho: f64, mu_plus: f64, mu_minus: f64, lap_d: f64) -> f64 {
        mu_minus * self.tables[1].eval(rho) + (mu_plus - mu_minus) * self.tables[2].eval(rho) + lap_d * self.tables[3].eval(rho)
    }

    /// `E(ρ)`.
    pub fn eta_mass_at(&self, rho: f64) -> f64 {
        self.tables[4].eval(rho)
    }

    /// `g0 d_Γ = (μ0⁺ + μ0⁻ + 2σΔd_Γ) / K`.
    pub fn g0_times_d(&self, mu_plus: f64, mu_minus: f64, lap_d: f64) -> f64 {
        (mu_plus + mu_minus + 2.0 * self.sigma() * lap_d) / self.moments.k_eta
    }

    /// Right-hand side `A⁰ = −μ0 − θ0' Δd_Γ + g0 d_Γ η'` on the grid.
    pub fn c1_rhs(&self, mu_plus: f64, mu_minus: f64, lap_d: f64) -> Vec<f64> {
        let gd = self.g0_times_d(mu_plus, mu_minus, lap_d);
        (0..self.theta0.values.len())
            .map(|i| {
                let mu0 = mu_plus * self.eta.values[i] + mu_minus * (1.0 - self.eta.values[i]);
                -mu0 - self.theta0.derivative[i] * lap_d + gd * self.eta.derivative[i]
            })
            .collect()
    }

    /// `<A⁰, θ0'>`.
    pub fn solvability(&self, mu_plus: f64, mu_minus: f64, lap_d: f64) -> f64 {
        inner(&self.theta0.grid, &self.c1_rhs(mu_plus, mu_minus, lap_d), &self.theta0.derivative)
    }

    /// Direct solve of the `c1` problem for one set of outer data.
    pub fn solve_c1(&self, mu_plus: f64, mu_minus: f64, lap_d: f64) -> Result<LinearizedSolution> {
        solve_linearized(&self.theta0, &self.c1_rhs(mu_plus, mu_minus, lap_d), &self.well)
    }
}

/// Outer expansion on both sides of the interface.
#[derive(Debug, Clone)]
pub struct OuterTerms {
    /// Sharp interface radius.
    pub trajectory: Arc<SharpTrajectory>,
    /// Potential.
    pub well: DoubleWell,
    /// Include the algebraic `ε² c2±` correction.
    pub second_order: bool,
}

impl OuterTerms {
    /// `μ0±(x, t)`, each branch extended smoothly across `Γ`.
    pub fn mu0(&self, side: Side, r: f64, t: f64) -> f64 {
        let tr = &self.trajectory;
        let rad = tr.radius(t);
        match side {
            Side::Plus => mu_inside(rad, tr.sigma),
            Side::Minus => mu_outside(r, rad, tr.r_out, tr.sigma),
        }
    }

    /// `c1± = μ0± / f''(±1)`.
    pub fn c1(&self, side: Side, r: f64, t: f64) -> f64 {
        self.mu0(side, r, t) / self.well.d2f(side.sign())
    }

    /// `c2± = −f'''(±1) (c1±)² / (2 f''(±1))`, or zero when disabled.
    pub fn c2(&self, side: Side, r: f64, t: f64) -> f64 {
        if !self.second_order {
            return 0.0;
        }
        let s = side.sign();
        let c1 = self.c1(side, r, t);
        -self.well.d3f(s) * c1 * c1 / (2.0 * self.well.d2f(s))
    }

    /// `c_O± = ±1 + ε c1± + ε² c2±`.
    pub fn c(&self, side: Side, r: f64, t: f64, eps: f64) -> f64 {
        side.sign() + eps * self.c1(side, r, t) + eps * eps * self.c2(side, r, t)
    }

    /// `p0±`.
    pub fn p0(&self, side: Side, t: f64) -> f64 {
        let (pp, pm) = radial_pressure(self.trajectory.radius(t), self.trajectory.sigma);
        match side {
            Side::Plus => pp,
            Side::Minus => pm,
        }
    }
}

/// Boundary-layer terms at `∂Ω`. With `μ = 0` imposed on `∂Ω` they
/// coincide with the outer `−` terms, which already meet `c = −1`, `μ = 0`.
#[derive(Debug, Clone)]
pub struct BoundaryTerms {
    outer: OuterTerms,
}

impl BoundaryTerms {
    /// `c_B`.
    pub fn c(&self, r: f64, t: f64, eps: f64) -> f64 {
        self.outer.c(Side::Minus, r, t, eps)
    }

    /// `μ_B`.
    pub fn mu(&self, r: f64, t: f64) -> f64 {
        self.outer.mu0(Side::Minus, r, t)
    }

    /// `p_B`.
    pub fn p(&self, t: f64) -> f64 {
        self.outer.p0(Side::Minus, t)
    }
}

/// Everything evaluated at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ApproxSample {
    /// `c_A`.
    pub c: f64,
    /// `μ_A`.
    pub mu: f64,
    /// `v_A`.
    pub v: Vec2,
    /// `p_A`.
    pub p: f64,
    /// `d_Γ`.
    pub d_gamma: f64,
    /// `d_B`.
    pub d_b: f64,
    /// `ρ = d_Γ / ε`.
    pub rho: f64,
    /// `ξ(d_Γ)`.
    pub xi_gamma: f64,
    /// `ξ(2 d_B)`.
    pub xi_boundary: f64,
    /// Inner `c_I` (zero where unused).
    pub c_inner: f64,
    /// Outer `c_O`.
    pub c_outer: f64,
}

/// Glued approximate solution for one value of `ε`.
#[derive(Debug, Clone)]
pub struct ApproxField {
    /// Interface width parameter.
    pub eps: f64,
    /// Chart of the sharp interface.
    pub chart: TubularChart<Circle<Arc<SharpTrajectory>>>,
    /// Inner profiles.
    pub profiles: Arc<InnerProfiles>,
    /// Outer terms.
    pub outer: OuterTerms,
    /// Boundary terms.
    pub boundary: BoundaryTerms,
}

impl ApproxField {
    /// Outer radius.
    pub fn r_out(&self) -> f64 {
        self.outer.trajectory.r_out
    }

    /// Sharp radius `R(t)`.
    pub fn radius(&self, t: f64) -> f64 {
        self.outer.trajectory.radius(t)
    }

    /// `δ`.
    pub fn delta(&self) -> f64 {
        self.chart.delta
    }

    /// Inner `c_I`, `μ_I`, `p_I` at radius `r`.
    pub fn inner_at(&self, r: f64, t: f64) -> (f64, f64, f64) {
        let rad = self.radius(t);
        let d = rad - r;
        let rho = d / self.eps;
        let mp = self.outer.mu0(Side::Plus, r, t);
        let mm = self.outer.mu0(Side::Minus, r, t);
        let lap_d = -1.0 / r;
        let pr = &self.profiles;
        let c = pr.theta0_at(rho) + self.eps * pr.c1_at(rho, mp, mm, lap_d);
        let e = eta(rho)[0];
        let mu = mp * e + mm * (1.0 - e);
        let (pp, pm) = (self.outer.p0(Side::Plus, t), self.outer.p0(Side::Minus, t));
        let e_end = pr.eta_mass.far_field.1;
        let qd = (pp - pm) - 2.0 * mm - (mp - mm) * e_end;
        let p = pm + mm * (pr.theta0_at(rho) + 1.0) + (mp - mm) * pr.eta_mass_at(rho) + qd * e;
        (c, mu, p)
    }

    /// Evaluates the glued fields at `(x, t)`.
    pub fn eval(&self, x: Vec2, t: f64) -> Result<ApproxSample> {
        let r = x.norm();
        let r_out = self.r_out();
        if r > r_out * (1.0 + 1e-12) {
            return Err(Error::InvalidInput(alloc::format!("point at radius {r} outside the domain")));
        }
        let d = self.radius(t) - r;
        let d_b = r - r_out;
        let delta = self.delta();
        let xg = xi(d, delta)[0];
        let xb = xi(2.0 * d_b, delta)[0];
        let side = if d >= 0.0 { Side::Plus } else { Side::Minus };
        let c_o = self.outer.c(side, r, t, self.eps);
        let mu_o = self.outer.mu0(side, r, t);
        let p_o = self.outer.p0(side, t);
        let mut s = ApproxSample { d_gamma: d, d_b, rho: d / self.eps, xi_gamma: xg, xi_boundary: xb, c_outer: c_o, ..Default::default() };
        let wo = (1.0 - xg) * (1.0 - xb);
        s.c = wo * c_o;
        s.mu = wo * mu_o;
        s.p = wo * p_o;
        if xg > 0.0 {
            let (ci, mi, pi) = self.inner_at(r, t);
            s.c_inner = ci;
            s.c += xg * ci;
            s.mu += xg * mi;
            s.p += xg * pi;
        }
        if xb > 0.0 {
            s.c += xb * self.boundary.c(r, t, self.eps);
            s.mu += xb * self.boundary.mu(r, t);
            s.p += xb * self.boundary.p(t);
        }
        Ok(s)
    }

    /// `c_A(x, t)`.
    pub fn c(&self, x: Vec2, t: f64) -> Result<f64> {
        Ok(self.eval(x, t)?.c)
    }

    /// `μ_A(x, t)`.
    pub fn mu(&self, x: Vec2, t: f64) -> Result<f64> {
        Ok(self.eval(x, t)?.mu)
    }

    /// `sup |c_I − c_O|` over the transition layer `δ ≤ |d_Γ| ≤ 2δ` at time
    /// `t`, sampled at `n` radii per side.
    pub fn matching_error(&self, t: f64, n: usize) -> f64 {
        let (rad, delta) = (self.radius(t), self.delta());
        let mut worst: f64 = 0.0;
        for k in 0..=n {
            let a = delta * (1.0 + k as f64 / n as f64);
            for (r, side) in [(rad - a, Side::Plus), (rad + a, Side::Minus)] {
                let ci = self.inner_at(r, t).0;
                worst = worst.max((ci - self.outer.c(side, r, t, self.eps)).abs());
            }
        }
        worst
    }
}

/// Radial test problem: a circle of radius `r0` centred in a disk of
/// radius `r_out`.
#[derive(Debug, Clone)]
pub struct RadialScenario {
    /// Potential.
    pub well: DoubleWell,
    /// Initial radius.
    pub r0: f64,
    /// Domain radius.
    pub r_out: f64,
    /// Tube parameter `δ`.
    pub delta: f64,
    /// Final time.
    pub t_end: f64,
    /// Include `ε² c2±` in the outer expansion.
    pub outer_c2: bool,
    /// Profile grid.
    pub rho_grid: RhoGrid,
    /// Sharp integrator tolerances.
    pub sharp: StepControl,
}

/// Shared, `ε`-independent ingredients.
#[derive(Debug, Clone)]
pub struct Prepared {
    /// Profiles.
    pub profiles: Arc<InnerProfiles>,
    /// Sharp trajectory, covering slightly beyond `t_end`.
    pub trajectory: Arc<SharpTrajectory>,
}

impl RadialScenario {
    /// Largest default `δ`: `min(R0/4, 0.95 (R_out − R0)/5)`.
    pub fn default_delta(r0: f64, r_out: f64) -> f64 {
        (0.25 * r0).min(0.95 * (r_out - r0) / 5.0)
    }

    /// Scenario with default `δ`, grid and tolerances.
    pub fn new(r0: f64, r_out: f64, t_end: f64) -> Self {
        Self {
            well: DoubleWell::default(),
            r0,
            r_out,
            delta: Self::default_delta(r0, r_out),
            t_end,
            outer_c2: true,
            rho_grid: RhoGrid::default(),
            sharp: StepControl::default(),
        }
    }

    /// Solves profiles and the sharp problem.
    pub fn prepare(&self) -> Result<Prepared> {
        let profiles = Arc::new(InnerProfiles::build(&self.rho_grid, self.well)?);
        let horizon = self.t_end * 1.01 + 1e-3;
        let trajectory = Arc::new(evolve_sharp(self.r0, self.r_out, profiles.sigma(), horizon, self.sharp)?);
        Ok(Prepared { profiles, trajectory })
    }

    /// Builds the glued field for one `ε`.
    pub fn field(&self, prepared: &Prepared, eps: f64) -> Result<ApproxField> {
        if !(eps > 0.0) {
            return Err(Error::InvalidInput("eps must be positive".into()));
        }
        let times: Vec<f64> = (0..=10).map(|k| self.t_end * k as f64 / 10.0).collect();
        let chart = TubularChart::new(
            Circle::new(Vec2::default(), prepared.trajectory.clone()),
            self.delta,
            Domain::Disk { center: Vec2::default(), radius: self.r_out },
            &times,
        )?;
        let outer = OuterTerms { trajectory: prepared.trajectory.clone(), well: self.well, second_order: self.outer_c2 };
        Ok(ApproxField { eps, chart, profiles: prepared.profiles.clone(), boundary: BoundaryTerms { outer: outer.clone() }, outer })
    }
}

/// Quantities entering the spectral estimate for the linearized operator.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpectralReport {
    /// `min f''(c_A)` outside `Γ(δ)`.
    pub min_fpp_outside: f64,
    /// `1 / min f''(c_A)` outside `Γ(δ)`.
    pub c_star: f64,
    /// `sup (|p| + ε|q|/(ε + |d_Γ|))` over `Γ(2δ)` for the split
    /// `c_I = θ0(ρ) + ε p θ1(ρ) + ε² q`, `p = Δd_Γ∘Pr`.
    pub pq_bound: f64,
    /// `sup |c_A|` over `Γ(δ)`.
    pub sup_c: f64,
    /// `sup |∇^Γ c_A|` over `Γ(δ)`.
    pub sup_tangential_grad: f64,
    /// Number of samples.
    pub samples: usize,
}

/// Samples the spectral quantities at `n_r` radii per time in `times`.
pub fn spectral_check(field: &ApproxField, times: &[f64], n_r: usize) -> Result<SpectralReport> {
    let mut rep = SpectralReport { min_fpp_outside: f64::INFINITY, ..Default::default() };
    let delta = field.delta();
    let r_out = field.r_out();
    let well = field.profiles.well;
    let th1 = field.profiles.theta1.profile.table();
    for &t in times {
        let rad = field.radius(t);
        for k in 0..=n_r {
            let r = r_out * k as f64 / n_r as f64;
            let phi = 0.37 * k as f64;
            let x = Vec2::polar(r, phi);
            let s = field.eval(x, t)?;
            rep.samples += 1;
            let d = s.d_gamma;
            if d.abs() >= delta {
                rep.min_fpp_outside = rep.min_fpp_outside.min(well.d2f(s.c));
            } else {
                rep.sup_c = rep.sup_c.max(s.c.abs());
                let hs = 1e-6;
                let tang = Vec2::polar(1.0, phi).rot90();
                let g = (field.c(x + tang * hs, t)? - field.c(x - tang * hs, t)?) / (2.0 * hs);
                rep.sup_tangential_grad = rep.sup_tangential_grad.max(g.abs());
            }
            if d.abs() < 2.0 * delta {
                let p = -1.0 / rad;
                let (ci, _, _) = field.inner_at(r.max(1e-12), t);
                let rho = d / field.eps;
                let q = (ci - field.profiles.theta0_at(rho) - field.eps * p * th1.eval(rho)) / (field.eps * field.eps);
                rep.pq_bound = rep.pq_bound.max(p.abs() + field.eps * q.abs() / (field.eps + d.abs()));
            }
        }
    }
    rep.c_star = 1.0 / rep.min_fpp_outside;
    Ok(rep)
}
