//! Closed curves, signed distance, tubular coordinates and surface
//! operators.
//!
//! Conventions: curves are parametrised counter-clockwise by `s ∈ [0, 1)`,
//! the normal `n = rot90(∂s X0)/|∂s X0|` points into the enclosed region
//! `Ω⁺`, and `d_Γ > 0` inside. The signed curvature `κ` satisfies
//! `∂s n = κ ∂s X0`, so that the tubular Jacobian is `1 + r κ`; for a
//! circle of radius `R`, `κ = −1/R = Δd_Γ|_Γ`.

use crate::error::{Error, Result};
use crate::linalg::solve_cyclic_tridiagonal;
use crate::profiles::smooth_step;
use crate::vec2::Vec2;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

const TAU: f64 = 2.0 * PI;

/// Time-dependent radius of a circle.
pub trait RadiusLaw {
    /// `R(t)`.
    fn radius(&self, t: f64) -> f64;
    /// `dR/dt`.
    fn rate(&self, t: f64) -> f64;
}

impl RadiusLaw for f64 {
    fn radius(&self, _t: f64) -> f64 {
        *self
    }
    fn rate(&self, _t: f64) -> f64 {
        0.0
    }
}

impl<T: RadiusLaw + ?Sized> RadiusLaw for alloc::sync::Arc<T> {
    fn radius(&self, t: f64) -> f64 {
        (**self).radius(t)
    }
    fn rate(&self, t: f64) -> f64 {
        (**self).rate(t)
    }
}

/// `R(t) = r0 + v t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearRadius {
    /// Radius at `t = 0`.
    pub r0: f64,
    /// Constant rate.
    pub v: f64,
}

impl RadiusLaw for LinearRadius {
    fn radius(&self, t: f64) -> f64 {
        self.r0 + self.v * t
    }
    fn rate(&self, _t: f64) -> f64 {
        self.v
    }
}

/// Closed, counter-clockwise parametrised curve `X0(s, t)`.
pub trait Curve {
    /// `X0(s, t)`.
    fn point(&self, s: f64, t: f64) -> Vec2;
    /// `∂s X0`.
    fn tangent(&self, s: f64, t: f64) -> Vec2;
    /// `∂ss X0`.
    fn tangent2(&self, s: f64, t: f64) -> Vec2;
    /// `∂t X0`.
    fn velocity(&self, s: f64, t: f64) -> Vec2 {
        let k = 1e-6;
        (self.point(s, t + k) - self.point(s, t - k)) * (0.5 / k)
    }
    /// Parameter of the closest point on the curve.
    fn project(&self, x: Vec2, t: f64) -> Result<f64>;
    /// Smallest radius of curvature.
    fn min_radius_of_curvature(&self, t: f64) -> f64;
}

/// Circle around a fixed centre.
#[derive(Debug, Clone)]
pub struct Circle<L> {
    /// Centre.
    pub center: Vec2,
    /// Radius law.
    pub law: L,
}

impl<L: RadiusLaw> Circle<L> {
    /// Circle with the given centre and radius law.
    pub fn new(center: Vec2, law: L) -> Self {
        Self { center, law }
    }
}

impl<L: RadiusLaw> Curve for Circle<L> {
    fn point(&self, s: f64, t: f64) -> Vec2 {
        self.center + Vec2::polar(self.law.radius(t), TAU * s)
    }
    fn tangent(&self, s: f64, t: f64) -> Vec2 {
        Vec2::polar(TAU * self.law.radius(t), TAU * s).rot90()
    }
    fn tangent2(&self, s: f64, t: f64) -> Vec2 {
        -Vec2::polar(TAU * TAU * self.law.radius(t), TAU * s)
    }
    fn velocity(&self, s: f64, t: f64) -> Vec2 {
        Vec2::polar(self.law.rate(t), TAU * s)
    }
    fn project(&self, x: Vec2, t: f64) -> Result<f64> {
        let r = self.law.radius(t);
        if !(r > 0.0) {
            return Err(Error::DegenerateRadius { radius: r });
        }
        let y = x - self.center;
        if y.norm() == 0.0 {
            return Err(Error::ProjectionDiverged);
        }
        Ok(wrap(y.y.atan2(y.x) / TAU))
    }
    fn min_radius_of_curvature(&self, t: f64) -> f64 {
        self.law.radius(t)
    }
}

fn wrap(s: f64) -> f64 {
    let w = s - s.floor();
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Static periodic cubic spline through control points at `s = k/m`.
#[derive(Debug, Clone)]
pub struct ClosedSpline {
    p: Vec<Vec2>,
    m2: Vec<Vec2>,
}

impl ClosedSpline {
    /// Interpolates the closed polygon `points`. The orientation is made
    /// counter-clockwise; self-intersecting curves are rejected.
    pub fn new(points: &[Vec2]) -> Result<Self> {
        let m = points.len();
        if m < 4 {
            return Err(Error::InvalidInput("closed spline needs at least four points".into()));
        }
        let mut p = points.to_vec();
        let area: f64 = (0..m).map(|k| p[k].cross(p[(k + 1) % m])).sum();
        if area < 0.0 {
            p.reverse();
        }
        let dsq = 1.0 / (m * m) as f64;
        let (sub, diag, sup) = (vec![1.0; m], vec![4.0; m], vec![1.0; m]);
        let mut mx: Vec<f64> = (0..m).map(|k| 6.0 * (p[(k + 1) % m].x - 2.0 * p[k].x + p[(k + m - 1) % m].x) / dsq).collect();
        let mut my: Vec<f64> = (0..m).map(|k| 6.0 * (p[(k + 1) % m].y - 2.0 * p[k].y + p[(k + m - 1) % m].y) / dsq).collect();
        solve_cyclic_tridiagonal(&sub, &diag, &sup, &mut mx)?;
        solve_cyclic_tridiagonal(&sub, &diag, &sup, &mut my)?;
        let spline = Self { p, m2: mx.into_iter().zip(my).map(|(a, b)| Vec2::new(a, b)).collect() };
        if !spline.is_simple(16 * m) {
            return Err(Error::InvalidInput("closed spline intersects itself".into()));
        }
        Ok(spline)
    }

    fn segment(&self, s: f64) -> (usize, usize, f64) {
        let m = self.p.len();
        let u = wrap(s) * m as f64;
        let k = (u.floor() as usize).min(m - 1);
        (k, (k + 1) % m, u - k as f64)
    }

    fn is_simple(&self, samples: usize) -> bool {
        let pts: Vec<Vec2> = (0..samples).map(|i| self.point(i as f64 / samples as f64, 0.0)).collect();
        let seg = |i: usize| (pts[i], pts[(i + 1) % samples]);
        for i in 0..samples {
            for j in i + 2..samples {
                if i == 0 && j == samples - 1 {
                    continue;
                }
                let (a, b) = seg(i);
                let (c, d) = seg(j);
                let o1 = (b - a).cross(c - a);
                let o2 = (b - a).cross(d - a);
                let o3 = (d - c).cross(a - c);
                let o4 = (d - c).cross(b - c);
                if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
                    return false;
                }
            }
        }
        true
    }
}

impl Curve for ClosedSpline {
    fn point(&self, s: f64, _t: f64) -> Vec2 {
        let (k, k1, u) = self.segment(s);
        let dsq = 1.0 / (self.p.len() * self.p.len()) as f64;
        let v = 1.0 - u;
        self.p[k] * v + self.p[k1] * u + (self.m2[k] * (v * v * v - v) + self.m2[k1] * (u * u * u - u)) * (dsq / 6.0)
    }
    fn tangent(&self, s: f64, _t: f64) -> Vec2 {
        let (k, k1, u) = self.segment(s);
        let m = self.p.len() as f64;
        let v = 1.0 - u;
        (self.p[k1] - self.p[k]) * m + (self.m2[k] * (1.0 - 3.0 * v * v) + self.m2[k1] * (3.0 * u * u - 1.0)) * (1.0 / (6.0 * m))
    }
    fn tangent2(&self, s: f64, _t: f64) -> Vec2 {
        let (k, k1, u) = self.segment(s);
        self.m2[k] * (1.0 - u) + self.m2[k1] * u
    }
    fn velocity(&self, _s: f64, _t: f64) -> Vec2 {
        Vec2::default()
    }
    fn project(&self, x: Vec2, t: f64) -> Result<f64> {
        let n = 16 * self.p.len();
        let mut s = 0.0;
        let mut best = f64::INFINITY;
        for i in 0..n {
            let si = i as f64 / n as f64;
            let d = (self.point(si, t) - x).norm2();
            if d < best {
                best = d;
                s = si;
            }
        }
        for _ in 0..50 {
            let e = self.point(s, t) - x;
            let tg = self.tangent(s, t);
            let g = e.dot(tg);
            let dg = tg.norm2() + e.dot(self.tangent2(s, t));
            if !(dg > 0.0) {
                return Err(Error::ProjectionDiverged);
            }
            let step = (g / dg).clamp(-0.5 / n as f64 * 4.0, 0.5 / n as f64 * 4.0);
            s -= step;
            if step.abs() < 1e-15 {
                return Ok(wrap(s));
            }
        }
        Err(Error::ProjectionDiverged)
    }
    fn min_radius_of_curvature(&self, t: f64) -> f64 {
        let n = 64 * self.p.len();
        (0..n)
            .map(|i| {
                let s = i as f64 / n as f64;
                let a = self.tangent(s, t);
                let b = self.tangent2(s, t);
                a.norm().powi(3) / a.cross(b).abs().max(1e-300)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Fixed outer boundary `∂Ω`; `d_B < 0` inside `Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// Disk.
    Disk {
        /// Centre.
        center: Vec2,
        /// Radius.
        radius: f64,
    },
    /// Axis-aligned square.
    Square {
        /// Centre.
        center: Vec2,
        /// Half side length.
        half: f64,
    },
}

impl Domain {
    /// Signed distance to `∂Ω`, negative inside.
    pub fn signed_distance(&self, x: Vec2) -> f64 {
        match *self {
            Domain::Disk { center, radius } => (x - center).norm() - radius,
            Domain::Square { center, half } => {
                let q = Vec2::new((x.x - center.x).abs() - half, (x.y - center.y).abs() - half);
                let outside = Vec2::new(q.x.max(0.0), q.y.max(0.0)).norm();
                outside + q.x.max(q.y).min(0.0)
            }
        }
    }
}

/// Tubular coordinates of a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    /// Foot-point parameter `S(x, t)`.
    pub s: f64,
    /// Signed distance `d_Γ(x, t)`.
    pub d: f64,
    /// Foot point.
    pub foot: Vec2,
    /// Unit inward normal at the foot.
    pub normal: Vec2,
    /// `∂s X0` at the foot.
    pub tangent: Vec2,
    /// Signed curvature at the foot.
    pub kappa: f64,
}

/// Tubular neighbourhood of an evolving curve inside a fixed domain.
#[derive(Debug, Clone)]
pub struct TubularChart<C> {
    /// The curve.
    pub curve: C,
    /// Tube half-width parameter `δ`.
    pub delta: f64,
    /// Outer domain.
    pub domain: Domain,
}

impl<C: Curve> TubularChart<C> {
    /// Validates `3δ` below the smallest radius of curvature and
    /// `dist(Γ, ∂Ω) > 5δ` at each time in `times`.
    pub fn new(curve: C, delta: f64, domain: Domain, times: &[f64]) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidInput("delta must be positive".into()));
        }
        for &t in times {
            let rc = curve.min_radius_of_curvature(t);
            if 3.0 * delta >= rc {
                return Err(Error::ChartMismatch(alloc::format!("3*delta = {} not below curvature radius {rc} at t = {t}", 3.0 * delta)));
            }
            let gap = Self::boundary_gap(&curve, &domain, t);
            if gap <= 5.0 * delta {
                return Err(Error::ChartMismatch(alloc::format!("dist(curve, boundary) = {gap} not above 5*delta = {} at t = {t}", 5.0 * delta)));
            }
        }
        Ok(Self { curve, delta, domain })
    }

    fn boundary_gap(curve: &C, domain: &Domain, t: f64) -> f64 {
        let n = 2048;
        (0..n).map(|i| -domain.signed_distance(curve.point(i as f64 / n as f64, t))).fold(f64::INFINITY, f64::min)
    }

    /// Smallest distance from the curve to `∂Ω` at time `t`.
    pub fn separation(&self, t: f64) -> f64 {
        Self::boundary_gap(&self.curve, &self.domain, t)
    }

    /// Unit inward normal at parameter `s`.
    pub fn normal(&self, s: f64, t: f64) -> Vec2 {
        self.curve.tangent(s, t).rot90().unit()
    }

    /// Signed curvature `κ` at parameter `s`.
    pub fn curvature(&self, s: f64, t: f64) -> f64 {
        let a = self.curve.tangent(s, t);
        let b = self.curve.tangent2(s, t);
        // ∂s n = κ ∂s X0 with n = rot90(a)/|a|
        -a.cross(b) / a.norm().powi(3)
    }

    /// Tubular coordinates of `x`.
    pub fn locate(&self, x: Vec2, t: f64) -> Result<ChartPoint> {
        let s = self.curve.project(x, t)?;
        let foot = self.curve.point(s, t);
        let tangent = self.curve.tangent(s, t);
        let normal = tangent.rot90().unit();
        Ok(ChartPoint { s, d: (x - foot).dot(normal), foot, normal, tangent, kappa: self.curvature(s, t) })
    }

    /// `d_Γ(x, t)`.
    pub fn signed_distance(&self, x: Vec2, t: f64) -> Result<f64> {
        Ok(self.locate(x, t)?.d)
    }

    /// `d_B(x)`.
    pub fn boundary_distance(&self, x: Vec2) -> f64 {
        self.domain.signed_distance(x)
    }

    /// Fails unless `|d| < limit_factor · δ`.
    pub fn require_inside(&self, d: f64, limit_factor: f64) -> Result<()> {
        let limit = limit_factor * self.delta;
        if d.abs() < limit {
            Ok(())
        } else {
            Err(Error::OutsideChart { distance: d, limit })
        }
    }

    /// `Δd_Γ(x, t) = κ / (1 + d κ)`.
    pub fn laplacian_distance(&self, x: Vec2, t: f64) -> Result<f64> {
        let p = self.locate(x, t)?;
        Ok(p.kappa / (1.0 + p.d * p.kappa))
    }

    /// `∇S(x, t)`.
    pub fn grad_s(&self, x: Vec2, t: f64) -> Result<Vec2> {
        let p = self.locate(x, t)?;
        Ok(p.tangent * (1.0 / (p.tangent.norm2() * (1.0 + p.d * p.kappa))))
    }

    /// `ΔS(x, t)` by central differences of `∇S`.
    pub fn laplacian_s(&self, x: Vec2, t: f64) -> Result<f64> {
        let k = 1e-5;
        let mut div = 0.0;
        for axis in 0..2 {
            let e = Vec2::axis(axis) * k;
            let a = self.grad_s(x + e, t)?;
            let b = self.grad_s(x - e, t)?;
            let diff = if axis == 0 { a.x - b.x } else { a.y - b.y };
            div += diff / (2.0 * k);
        }
        Ok(div)
    }

    /// `∂t d_Γ(x, t) = −∂t X0 · n = −V`.
    pub fn dt_distance(&self, x: Vec2, t: f64) -> Result<f64> {
        let p = self.locate(x, t)?;
        Ok(-self.curve.velocity(p.s, t).dot(p.normal))
    }

    /// Normal velocity `V(s, t)` (positive towards `Ω⁺`).
    pub fn normal_velocity(&self, s: f64, t: f64) -> f64 {
        self.curve.velocity(s, t).dot(self.normal(s, t))
    }

    /// `∂t S(x, t)` at fixed `x`.
    pub fn dt_s(&self, x: Vec2, t: f64) -> Result<f64> {
        let p = self.locate(x, t)?;
        let k = 1e-6;
        let dn = (self.normal(p.s, t + k) - self.normal(p.s, t - k)) * (0.5 / k);
        let vel = self.curve.velocity(p.s, t);
        Ok(-(vel.dot(p.tangent) + p.d * dn.dot(p.tangent)) / (p.tangent.norm2() * (1.0 + p.d * p.kappa)))
    }
}

/// Scalar function on the curve, `h(s, t)`.
pub trait SurfaceFunction {
    /// `h`.
    fn value(&self, s: f64, t: f64) -> f64;
    /// `∂s h`.
    fn ds(&self, s: f64, t: f64) -> f64;
    /// `∂ss h`.
    fn dss(&self, s: f64, t: f64) -> f64;
    /// `∂t h`.
    fn dt(&self, s: f64, t: f64) -> f64;
}

/// `h ≡ 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZeroHeight;

impl SurfaceFunction for ZeroHeight {
    fn value(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn ds(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn dss(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn dt(&self, _: f64, _: f64) -> f64 {
        0.0
    }
}

/// `h(s, t) = a cos(2π k s) e^{λ t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineMode {
    /// Amplitude `a`.
    pub amplitude: f64,
    /// Wavenumber `k`.
    pub mode: f64,
    /// Growth rate `λ`.
    pub growth: f64,
}

impl SurfaceFunction for CosineMode {
    fn value(&self, s: f64, t: f64) -> f64 {
        self.amplitude * (TAU * self.mode * s).cos() * (self.growth * t).exp()
    }
    fn ds(&self, s: f64, t: f64) -> f64 {
        -self.amplitude * TAU * self.mode * (TAU * self.mode * s).sin() * (self.growth * t).exp()
    }
    fn dss(&self, s: f64, t: f64) -> f64 {
        -(TAU * self.mode).powi(2) * self.value(s, t)
    }
    fn dt(&self, s: f64, t: f64) -> f64 {
        self.growth * self.value(s, t)
    }
}

/// Surface derivatives of `h ∘ S` at a point of the tube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceOps {
    /// `∂t^Γ h = ∂t h + ∂t S ∂s h`.
    pub dt: f64,
    /// `∇^Γ h = ∇S ∂s h`.
    pub grad: Vec2,
    /// `Δ^Γ h = ΔS ∂s h + |∇S|² ∂ss h`.
    pub lap: f64,
}

/// Surface operators of `h` at `x`; requires `|d_Γ(x)| < 3δ`.
pub fn surface_operators<C: Curve, H: SurfaceFunction>(chart: &TubularChart<C>, h: &H, x: Vec2, t: f64) -> Result<SurfaceOps> {
    let p = chart.locate(x, t)?;
    chart.require_inside(p.d, 3.0)?;
    let gs = chart.grad_s(x, t)?;
    let ls = chart.laplacian_s(x, t)?;
    let dts = chart.dt_s(x, t)?;
    let (hs, hss) = (h.ds(p.s, t), h.dss(p.s, t));
    Ok(SurfaceOps { dt: h.dt(p.s, t) + dts * hs, grad: gs * hs, lap: ls * hs + gs.norm2() * hss })
}

/// Stretched coordinates `(ρ, s)` of a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stretched {
    /// `ρ = d_Γ/ε − h(S, t)`.
    pub rho: f64,
    /// `S(x, t)`.
    pub s: f64,
    /// `d_Γ(x, t)`.
    pub d: f64,
}

/// `ρ = d_Γ/ε − h`; requires `|d_Γ| < 2δ`.
pub fn stretch<C: Curve, H: SurfaceFunction>(chart: &TubularChart<C>, x: Vec2, t: f64, eps: f64, h: &H) -> Result<Stretched> {
    let p = chart.locate(x, t)?;
    chart.require_inside(p.d, 2.0)?;
    Ok(Stretched { rho: p.d / eps - h.value(p.s, t), s: p.s, d: p.d })
}

/// Inverse of [`stretch`]: `X0(s) + ε(ρ + h) n(s)`.
pub fn unstretch<C: Curve, H: SurfaceFunction>(chart: &TubularChart<C>, rho: f64, s: f64, t: f64, eps: f64, h: &H) -> Vec2 {
    chart.curve.point(s, t) + chart.normal(s, t) * (eps * (rho + h.value(s, t)))
}

/// `J^ε = 1 + ε(ρ + h)κ`, the ratio of the area element in `(ρ, s)` to
/// `ε |∂s X0|`.
pub fn expansion_jacobian(eps: f64, rho: f64, h: f64, kappa: f64) -> f64 {
    1.0 + eps * (rho + h) * kappa
}

/// The cutoff `ξ`: one on `|s| ≤ δ`, zero on `|s| ≥ 2δ`, C^∞, with
/// `−4 ≤ s ξ'(s) ≤ 0`. Returns value, first and second derivative.
pub fn xi(s: f64, delta: f64) -> [f64; 3] {
    let a = s.abs();
    if a <= delta {
        return [1.0, 0.0, 0.0];
    }
    if a >= 2.0 * delta {
        return [0.0, 0.0, 0.0];
    }
    let st = smooth_step((a - delta) / delta);
    let sign = s.signum();
    [1.0 - st[0], -sign * st[1] / delta, -st[2] / (delta * delta)]
}

/// Maximum errors of the chart identities over a sample set.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InvariantReport {
    /// `max ||∇d_Γ| − 1|`.
    pub grad_d_unit: f64,
    /// `max |∇S · ∇d_Γ|`.
    pub grad_s_orthogonal: f64,
    /// Relative error of the chain rule for functions of `(ρ, x)`.
    pub chain_rule: f64,
    /// `max |x − X0(S) − d n(S)|`.
    pub decomposition: f64,
    /// `max |det DX / (ε|∂s X0|) − J^ε|`.
    pub jacobian: f64,
    /// Variation of `∂t d_Γ` along normals.
    pub normal_velocity: f64,
    /// `max |ΔS·∂sh + |∇S|²∂ssh − Δ(h∘S)|` (relative).
    pub surface_laplacian: f64,
    /// Number of points checked.
    pub samples: usize,
}

/// Checks the chart identities by central differences at `points` (which
/// must lie in `Γ(2δ)`), with stretching parameter `eps` and height `h`.
pub fn check_invariants<C: Curve, H: SurfaceFunction>(chart: &TubularChart<C>, h: &H, points: &[Vec2], t: f64, eps: f64) -> Result<InvariantReport> {
    let k = 1e-5;
    let mut rep = InvariantReport { samples: points.len(), ..Default::default() };
    // ϕ(ρ, x) = sin ρ · x₁ + 0.3 ρ² x₂
    let phi = |rho: f64, x: Vec2| rho.sin() * x.x + 0.3 * rho * rho * x.y;
    let phi_rho = |rho: f64, x: Vec2| rho.cos() * x.x + 0.6 * rho * x.y;
    let phi_x = |rho: f64| Vec2::new(rho.sin(), 0.3 * rho * rho);
    let composite = |x: Vec2| -> Result<f64> { Ok(phi(stretch(chart, x, t, eps, h)?.rho, x)) };
    for &x in points {
        let p = chart.locate(x, t)?;
        chart.require_inside(p.d, 2.0)?;
        let mut gd = Vec2::default();
        let mut gf = Vec2::default();
        let mut lap_hs = 0.0;
        let hs = |y: Vec2| -> Result<f64> { Ok(h.value(chart.curve.project(y, t)?, t)) };
        let h0 = hs(x)?;
        for axis in 0..2 {
            let e = Vec2::axis(axis) * k;
            let dd = (chart.signed_distance(x + e, t)? - chart.signed_distance(x - e, t)?) / (2.0 * k);
            let df = (composite(x + e)? - composite(x - e)?) / (2.0 * k);
            let ke = Vec2::axis(axis) * 1e-4;
            lap_hs += (hs(x + ke)? - 2.0 * h0 + hs(x - ke)?) / 1e-8;
            if axis == 0 {
                gd.x = dd;
                gf.x = df;
            } else {
                gd.y = dd;
                gf.y = df;
            }
        }
        rep.grad_d_unit = rep.grad_d_unit.max((gd.norm() - 1.0).abs());
        let gs = chart.grad_s(x, t)?;
        rep.grad_s_orthogonal = rep.grad_s_orthogonal.max(gs.dot(gd).abs() / gs.norm().max(1.0));
        let st = stretch(chart, x, t, eps, h)?;
        let ops = surface_operators(chart, h, x, t)?;
        let want = (p.normal * (1.0 / eps) - ops.grad) * phi_rho(st.rho, x) + phi_x(st.rho);
        rep.chain_rule = rep.chain_rule.max((gf - want).norm() / (1.0 + want.norm()));
        rep.decomposition = rep.decomposition.max((x - chart.curve.point(p.s, t) - p.normal * p.d).norm());
        rep.surface_laplacian = rep.surface_laplacian.max((ops.lap - lap_hs).abs() / (1.0 + ops.lap.abs()));
        // Jacobian of (ρ, s) ↦ X0(s) + ε(ρ + h(s)) n(s).
        let ks = 1e-6;
        let xs = (unstretch(chart, st.rho, st.s + ks, t, eps, h) - unstretch(chart, st.rho, st.s - ks, t, eps, h)) * (0.5 / ks);
        let xr = (unstretch(chart, st.rho + ks, st.s, t, eps, h) - unstretch(chart, st.rho - ks, st.s, t, eps, h)) * (0.5 / ks);
        let det = xr.cross(xs).abs() / (eps * p.tangent.norm());
        rep.jacobian = rep.jacobian.max((det - expansion_jacobian(eps, st.rho, h.value(st.s, t), p.kappa)).abs());
        // ∂t d_Γ at the point against its value on the curve.
        let kt = 1e-6;
        let dt_here = (chart.signed_distance(x, t + kt)? - chart.signed_distance(x, t - kt)?) / (2.0 * kt);
        let foot = p.foot;
        let dt_foot = (chart.signed_distance(foot, t + kt)? - chart.signed_distance(foot, t - kt)?) / (2.0 * kt);
        rep.normal_velocity = rep.normal_velocity.max((dt_here - dt_foot).abs());
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_sign_conventions() {
        let c = TubularChart::new(Circle::new(Vec2::default(), 1.0), 0.19, Domain::Disk { center: Vec2::default(), radius: 2.0 }, &[0.0]).unwrap();
        let p = c.locate(Vec2::new(0.5, 0.0), 0.0).unwrap();
        assert!((p.d - 0.5).abs() < 1e-15);
        assert!((p.kappa + 1.0).abs() < 1e-12);
        assert!((p.normal - Vec2::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((c.laplacian_distance(Vec2::new(0.0, 1.5), 0.0).unwrap() + 1.0 / 1.5).abs() < 1e-12);
    }

    #[test]
    fn separation_rule_is_enforced() {
        let dom = Domain::Disk { center: Vec2::default(), radius: 2.0 };
        assert!(matches!(TubularChart::new(Circle::new(Vec2::default(), 1.0), 0.25, dom, &[0.0]), Err(Error::ChartMismatch(_))));
        assert!(TubularChart::new(Circle::new(Vec2::default(), 1.0), 0.19, dom, &[0.0]).is_ok());
    }

    #[test]
    fn xi_properties() {
        let d = 0.2;
        for k in 0..=400 {
            let s = -0.5 + k as f64 / 400.0;
            let v = xi(s, d);
            assert!((0.0..=1.0).contains(&v[0]));
            let sx = s * v[1];
            assert!(sx <= 1e-15 && sx >= -4.0, "{s} {sx}");
        }
        assert_eq!(xi(0.2, d)[0], 1.0);
        assert_eq!(xi(-0.4, d)[0], 0.0);
    }

    #[test]
    fn square_distance_signs() {
        let dom = Domain::Square { center: Vec2::default(), half: 1.0 };
        assert!((dom.signed_distance(Vec2::new(0.5, 0.0)) + 0.5).abs() < 1e-15);
        assert!((dom.signed_distance(Vec2::new(2.0, 2.0)) - 2f64.sqrt()).abs() < 1e-15);
    }
}
