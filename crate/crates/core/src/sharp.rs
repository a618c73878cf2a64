//! Radially symmetric Mullins–Sekerka problem in a disk of radius `R_out`
//! with a circular interface of radius `R(t)` and `μ = 0` on the outer
//! boundary.

use crate::error::{Error, Result};
use crate::geometry::RadiusLaw;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// `μ` inside the interface: the constant `σ/R`.
pub fn mu_inside(radius: f64, sigma: f64) -> f64 {
    sigma / radius
}

/// Harmonic `μ` outside the interface, extended analytically to all `r > 0`:
/// `(σ/R) ln(r/R_out) / ln(R/R_out)`.
pub fn mu_outside(r: f64, radius: f64, r_out: f64, sigma: f64) -> f64 {
    sigma / radius * (r / r_out).ln() / (radius / r_out).ln()
}

/// `∂r μ` of the outside branch.
pub fn mu_outside_dr(r: f64, radius: f64, r_out: f64, sigma: f64) -> f64 {
    sigma / radius / (r * (radius / r_out).ln())
}

/// `μ(r)` of the sharp solution.
pub fn radial_mu(r: f64, radius: f64, r_out: f64, sigma: f64) -> Result<f64> {
    check_radius(radius, r_out)?;
    if !(0.0..=r_out).contains(&r) {
        return Err(Error::InvalidInput(alloc::format!("r = {r} outside [0, {r_out}]")));
    }
    Ok(if r <= radius { mu_inside(radius, sigma) } else { mu_outside(r, radius, r_out, sigma) })
}

fn check_radius(radius: f64, r_out: f64) -> Result<()> {
    if radius > 0.0 && radius < r_out && r_out.is_finite() {
        Ok(())
    } else {
        Err(Error::DegenerateRadius { radius })
    }
}

/// `dR/dt = σ / (2 R² ln(R/R_out))`.
pub fn interface_rate(radius: f64, r_out: f64, sigma: f64) -> Result<f64> {
    check_radius(radius, r_out)?;
    Ok(rate_unchecked(radius, r_out, sigma))
}

fn rate_unchecked(radius: f64, r_out: f64, sigma: f64) -> f64 {
    sigma / (2.0 * radius * radius * (radius / r_out).ln())
}

/// Pressures `(p⁺, p⁻)` of the resting fluid, gauged by `p⁻ = 0`.
pub fn radial_pressure(radius: f64, sigma: f64) -> (f64, f64) {
    (2.0 * sigma / radius, 0.0)
}

/// Error control of the embedded Runge–Kutta pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    /// Relative tolerance.
    pub rtol: f64,
    /// Absolute tolerance.
    pub atol: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12 }
    }
}

/// Accepted steps of `R(t)` with cubic Hermite dense output.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpTrajectory {
    /// Outer radius.
    pub r_out: f64,
    /// Surface tension.
    pub sigma: f64,
    /// Step times, increasing.
    pub times: Vec<f64>,
    /// Radii at the step times.
    pub radii: Vec<f64>,
    /// `dR/dt` at the step times.
    pub rates: Vec<f64>,
    /// Rejected steps.
    pub rejected: usize,
}

impl SharpTrajectory {
    /// Final time covered.
    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    fn locate(&self, t: f64) -> (usize, f64, f64) {
        let n = self.times.len();
        let t = t.clamp(self.times[0], self.times[n - 1]);
        let i = match self.times.binary_search_by(|v| v.partial_cmp(&t).unwrap_or(core::cmp::Ordering::Less)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        let h = self.times[i + 1] - self.times[i];
        (i, h, (t - self.times[i]) / h)
    }
}

impl RadiusLaw for SharpTrajectory {
    /// Dense output; clamped to the covered interval.
    fn radius(&self, t: f64) -> f64 {
        if self.times.len() == 1 {
            return self.radii[0];
        }
        let (i, h, u) = self.locate(t);
        let (u2, u3) = (u * u, u * u * u);
        (2.0 * u3 - 3.0 * u2 + 1.0) * self.radii[i]
            + (u3 - 2.0 * u2 + u) * h * self.rates[i]
            + (-2.0 * u3 + 3.0 * u2) * self.radii[i + 1]
            + (u3 - u2) * h * self.rates[i + 1]
    }

    fn rate(&self, t: f64) -> f64 {
        rate_unchecked(self.radius(t), self.r_out, self.sigma)
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B4: [f64; 7] = [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Integrates `R' = σ/(2R² ln(R/R_out))` from `R(0) = r0` to `t_end` with
/// the Dormand–Prince 5(4) pair. Fails with `InterfaceCollapse` once `R`
/// drops below `0.05 R_out`.
pub fn evolve_sharp(r0: f64, r_out: f64, sigma: f64, t_end: f64, ctrl: StepControl) -> Result<SharpTrajectory> {
    check_radius(r0, r_out)?;
    if !(t_end >= 0.0) || !(sigma > 0.0) {
        return Err(Error::InvalidInput("need t_end >= 0 and sigma > 0".into()));
    }
    let floor = 0.05 * r_out;
    let f = |r: f64| rate_unchecked(r, r_out, sigma);
    let mut traj = SharpTrajectory { r_out, sigma, times: alloc::vec![0.0], radii: alloc::vec![r0], rates: alloc::vec![f(r0)], rejected: 0 };
    let (mut t, mut r) = (0.0, r0);
    let mut h = (t_end * 1e-3).max(1e-12).min(1e-3);
    let mut k = [0.0; 7];
    while t < t_end {
        h = h.min(t_end - t);
        k[0] = f(r);
        let mut bad = false;
        for s in 1..7 {
            let y = r + h * (0..s).map(|j| A[s][j] * k[j]).sum::<f64>();
            if !(y > 0.0 && y < r_out) {
                bad = true;
                break;
            }
            k[s] = f(y);
        }
        if bad {
            h *= 0.25;
            traj.rejected += 1;
            if h < 1e-14 {
                return Err(Error::InterfaceCollapse { time: t, radius: r });
            }
            continue;
        }
        let y5 = r + h * (0..6).map(|j| A[6][j] * k[j]).sum::<f64>();
        let y4 = r + h * (0..7).map(|j| B4[j] * k[j]).sum::<f64>();
        let err = (y5 - y4).abs() / (ctrl.atol + ctrl.rtol * r.abs().max(y5.abs()));
        if err <= 1.0 {
            t += h;
            r = y5;
            traj.times.push(t);
            traj.radii.push(r);
            traj.rates.push(f(r));
            if r < floor {
                return Err(Error::InterfaceCollapse { time: t, radius: r });
            }
        } else {
            traj.rejected += 1;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIGMA: f64 = 0.471_404_520_791_031_7;

    #[test]
    fn initial_slope() {
        let v = interface_rate(1.0, 2.0, SIGMA).unwrap();
        assert!((v + 0.3401).abs() < 1e-4, "{v}");
    }

    #[test]
    fn mu_is_continuous_and_vanishes_outside() {
        let (r, ro) = (0.8, 2.0);
        assert!((mu_outside(r, r, ro, SIGMA) - mu_inside(r, SIGMA)).abs() < 1e-15);
        assert!(mu_outside(ro, r, ro, SIGMA).abs() < 1e-15);
        assert!(radial_mu(2.5, r, ro, SIGMA).is_err());
        assert!(interface_rate(2.0, 2.0, SIGMA).is_err());
    }

    #[test]
    fn collapse_is_reported() {
        let e = evolve_sharp(0.3, 2.0, SIGMA, 10.0, StepControl::default());
        assert!(matches!(e, Err(Error::InterfaceCollapse { .. })));
    }
}
