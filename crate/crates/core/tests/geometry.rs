use proptest::prelude::*;
use sil_core::geometry::*;
use sil_core::Vec2;
use std::f64::consts::PI;

fn lcg(seed: &mut u64) -> f64 {
    *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    ((*seed >> 11) as f64) / ((1u64 << 53) as f64)
}

fn disk(r: f64) -> Domain {
    Domain::Disk { center: Vec2::default(), radius: r }
}

fn circle_chart() -> TubularChart<Circle<LinearRadius>> {
    TubularChart::new(Circle::new(Vec2::new(0.1, -0.05), LinearRadius { r0: 1.0, v: -0.3 }), 0.19, disk(2.3), &[0.0, 0.1]).unwrap()
}

fn ellipse_chart() -> TubularChart<ClosedSpline> {
    let pts: Vec<Vec2> = (0..48).map(|k| {
        let a = 2.0 * PI * k as f64 / 48.0;
        Vec2::new(1.2 * a.cos(), 0.9 * a.sin())
    }).collect();
    TubularChart::new(ClosedSpline::new(&pts).unwrap(), 0.12, Domain::Square { center: Vec2::default(), half: 2.5 }, &[0.0]).unwrap()
}

fn tube_points<C: Curve>(chart: &TubularChart<C>, n: usize, t: f64, seed: u64) -> Vec<Vec2> {
    let mut s = seed;
    (0..n)
        .map(|_| {
            let sp = lcg(&mut s);
            let d = (2.0 * lcg(&mut s) - 1.0) * 1.9 * chart.delta;
            chart.curve.point(sp, t) + chart.normal(sp, t) * d
        })
        .collect()
}

#[test]
fn circle_identities_on_random_points() {
    let c = circle_chart();
    let h = CosineMode { amplitude: 0.3, mode: 2.0, growth: 0.5 };
    let pts = tube_points(&c, 1000, 0.05, 17);
    let rep = check_invariants(&c, &h, &pts, 0.05, 0.1).unwrap();
    assert!(rep.grad_d_unit <= 1e-5, "{rep:?}");
    assert!(rep.grad_s_orthogonal <= 1e-5, "{rep:?}");
    assert!(rep.chain_rule <= 1e-5, "{rep:?}");
    assert!(rep.jacobian <= 1e-8, "{rep:?}");
    assert!(rep.decomposition <= 1e-12, "{rep:?}");
    assert!(rep.normal_velocity <= 1e-6, "{rep:?}");
    assert!(rep.surface_laplacian <= 1e-4, "{rep:?}");
}

#[test]
fn spline_identities_on_random_points() {
    let c = ellipse_chart();
    let h = CosineMode { amplitude: 0.2, mode: 3.0, growth: 0.0 };
    let pts = tube_points(&c, 1000, 0.0, 5);
    let rep = check_invariants(&c, &h, &pts, 0.0, 0.1).unwrap();
    assert!(rep.grad_d_unit <= 1e-5, "{rep:?}");
    assert!(rep.grad_s_orthogonal <= 1e-5, "{rep:?}");
    assert!(rep.chain_rule <= 1e-5, "{rep:?}");
    assert!(rep.jacobian <= 1e-8, "{rep:?}");
    assert!(rep.decomposition <= 1e-10, "{rep:?}");
}

#[test]
fn circle_surface_operators_closed_form() {
    // ∇S = rot90(x)/(2π r²), ΔS = 0, and Δ(h∘S) = −cos(2πs)/r² for h = cos 2πs.
    let r0 = 1.3;
    let c = TubularChart::new(Circle::new(Vec2::default(), r0), 0.2, disk(3.0), &[0.0]).unwrap();
    let h = CosineMode { amplitude: 1.0, mode: 1.0, growth: 0.0 };
    for k in 0..12 {
        let s = k as f64 / 12.0 + 0.013;
        for &d in &[-0.3, 0.0, 0.25] {
            let x = c.curve.point(s, 0.0) + c.normal(s, 0.0) * d;
            let r = x.norm();
            let ops = surface_operators(&c, &h, x, 0.0).unwrap();
            let want = -(2.0 * PI * s).cos() / (r * r);
            assert!((ops.lap - want).abs() < 1e-6, "{} {want}", ops.lap);
            let gs = c.grad_s(x, 0.0).unwrap();
            assert!((gs - x.rot90() * (1.0 / (2.0 * PI * r * r))).norm() < 1e-12);
            assert!(c.laplacian_s(x, 0.0).unwrap().abs() < 1e-6);
        }
    }
}

#[test]
fn outside_tube_is_rejected() {
    let c = circle_chart();
    let x = Vec2::new(0.1, -0.05) + Vec2::new(0.3, 0.0);
    assert!(matches!(stretch(&c, x, 0.0, 0.05, &ZeroHeight), Err(sil_core::Error::OutsideChart { .. })));
}

#[test]
fn self_intersecting_spline_is_rejected() {
    let pts: Vec<Vec2> = (0..40).map(|k| {
        let a = 2.0 * PI * k as f64 / 40.0;
        Vec2::new(a.sin(), (2.0 * a).sin() * 0.5)
    }).collect();
    assert!(ClosedSpline::new(&pts).is_err());
}

#[test]
fn spline_reproduces_circle() {
    let pts: Vec<Vec2> = (0..64).map(|k| Vec2::polar(1.0, 2.0 * PI * k as f64 / 64.0)).collect();
    let sp = ClosedSpline::new(&pts).unwrap();
    for k in 0..200 {
        let s = k as f64 / 200.0;
        assert!((sp.point(s, 0.0).norm() - 1.0).abs() < 1e-6);
    }
    let c = TubularChart::new(sp, 0.15, disk(2.0), &[0.0]).unwrap();
    assert!((c.curvature(0.3, 0.0) + 1.0).abs() < 1e-3);
}

proptest! {
    #[test]
    fn stretch_roundtrip(s in 0.0f64..1.0, d in -0.35f64..0.35, eps in 0.01f64..0.2) {
        let c = circle_chart();
        let h = CosineMode { amplitude: 0.4, mode: 3.0, growth: 0.0 };
        let x = c.curve.point(s, 0.02) + c.normal(s, 0.02) * d;
        let st = stretch(&c, x, 0.02, eps, &h).unwrap();
        let y = unstretch(&c, st.rho, st.s, 0.02, eps, &h);
        prop_assert!((x - y).norm() < 1e-12);
    }

    #[test]
    fn xi_is_monotone_in_abs(a in 0.0f64..0.5, b in 0.0f64..0.5) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(xi(lo, 0.1)[0] >= xi(hi, 0.1)[0]);
        prop_assert!(xi(lo, 0.1)[0] == xi(-lo, 0.1)[0]);
    }
}
