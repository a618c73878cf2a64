use sil_core::expansion::*;
use sil_core::geometry::RadiusLaw;
use sil_core::Vec2;

fn setup() -> (RadialScenario, Prepared) {
    let sc = RadialScenario::new(1.0, 2.0, 0.05);
    let p = sc.prepare().unwrap();
    (sc, p)
}

#[test]
fn default_delta_respects_separation() {
    let d = RadialScenario::default_delta(1.0, 2.0);
    assert!((d - 0.19).abs() < 1e-12);
    assert!(5.0 * d < 1.0);
}

#[test]
fn basis_combination_equals_direct_solve() {
    let (_, p) = setup();
    let pr = &p.profiles;
    let g = pr.theta0.grid;
    for &(mp, mm, ld) in &[(0.47, 0.47, -1.0), (0.5, 0.41, -0.9), (0.45, 0.52, -1.2), (0.0, 0.3, 0.1)] {
        assert!(pr.solvability(mp, mm, ld).abs() <= 1e-8);
        let direct = pr.solve_c1(mp, mm, ld).unwrap();
        for i in (0..g.len()).step_by(7) {
            let rho = g.node(i);
            assert!((pr.c1_at(rho, mp, mm, ld) - direct.profile.values[i]).abs() < 1e-9);
        }
    }
}

#[test]
fn c1_on_interface_is_curvature_times_theta1() {
    let (_, p) = setup();
    let pr = &p.profiles;
    let (rad, sigma) = (0.93, pr.sigma());
    let mu = sigma / rad;
    let g = pr.theta0.grid;
    let th1 = &pr.theta1.profile.values;
    for i in (0..g.len()).step_by(11) {
        let got = pr.c1_at(g.node(i), mu, mu, -1.0 / rad);
        assert!((got - (-1.0 / rad) * th1[i]).abs() < 1e-9);
    }
}

#[test]
fn c1_far_field_matches_outer() {
    let (_, p) = setup();
    let pr = &p.profiles;
    let (mp, mm) = (0.5, 0.3);
    assert!((pr.c1_at(20.0, mp, mm, -1.0) - mp / 2.0).abs() < 1e-10);
    assert!((pr.c1_at(-20.0, mp, mm, -1.0) - mm / 2.0).abs() < 1e-10);
}

#[test]
fn deep_inside_value() {
    let (sc, p) = setup();
    for &eps in &[0.08, 0.04] {
        let f = sc.field(&p, eps).unwrap();
        let t = 0.02;
        let a = p.profiles.sigma() / (2.0 * p.trajectory.radius(t));
        let want = 1.0 + eps * a - 1.5 * a * a * eps * eps;
        assert!((f.c(Vec2::new(0.1, 0.2), t).unwrap() - want).abs() < 1e-13);
    }
}

#[test]
fn boundary_conditions_exact() {
    let (sc, p) = setup();
    let f = sc.field(&p, 0.04).unwrap();
    for k in 0..64 {
        let x = Vec2::polar(2.0, k as f64 * 0.1);
        for &t in &[0.0, 0.025, 0.05] {
            let s = f.eval(x, t).unwrap();
            assert!((s.c + 1.0).abs() <= 1e-12 && s.mu.abs() <= 1e-12);
        }
    }
    assert!(f.eval(Vec2::new(2.1, 0.0), 0.0).is_err());
}

#[test]
fn zero_level_set_tracks_sharp_interface() {
    let (sc, p) = setup();
    for &eps in &[0.08, 0.04, 0.02] {
        let f = sc.field(&p, eps).unwrap();
        let t = 0.03;
        let rad = f.radius(t);
        let c = f.c(Vec2::polar(rad, 0.4), t).unwrap();
        // θ0(0) = 0, c1(0) = 0: only the ε² outer term is absent on Γ
        assert!(c.abs() < 1e-9, "{c}");
    }
}

#[test]
fn matching_error_is_small() {
    let (sc, p) = setup();
    let errs: Vec<f64> = [0.08, 0.04, 0.02].iter().map(|&e| sc.field(&p, e).unwrap().matching_error(0.02, 40)).collect();
    for (e, &m) in [0.08f64, 0.04, 0.02].iter().zip(&errs) {
        assert!(m <= 10.0 * (-1.3 * 0.19 / (2.0 * e)).exp() + 2.0 * e * e, "{e} {m}");
    }
}

#[test]
fn spectral_quantities_bounded() {
    let (sc, p) = setup();
    for &eps in &[0.08, 0.04, 0.02] {
        let f = sc.field(&p, eps).unwrap();
        let rep = spectral_check(&f, &[0.0, 0.025, 0.05], 2000).unwrap();
        assert!(rep.c_star <= 1.0, "{rep:?}");
        assert!(rep.pq_bound.is_finite() && rep.pq_bound < 10.0, "{rep:?}");
        assert!(rep.sup_c <= 1.1);
        assert!(rep.sup_tangential_grad < 1e-6, "{rep:?}");
    }
}

#[test]
fn inner_pressure_jump_matches_sharp() {
    let (sc, p) = setup();
    let f = sc.field(&p, 0.04).unwrap();
    let t = 0.01;
    let rad = f.radius(t);
    let inside = f.eval(Vec2::new(0.2, 0.0), t).unwrap().p;
    let outside = f.eval(Vec2::new(1.6, 0.0), t).unwrap().p;
    assert!((inside - outside - 2.0 * p.profiles.sigma() / rad).abs() < 1e-12);
    // inner pressure reaches the outer value at the far edge of the tube
    let g = sc.field(&p, 0.02).unwrap();
    let a = g.inner_at(rad - 1.95 * 0.19, t).2;
    assert!((a - inside).abs() < 1e-8, "{a} {inside}");
}
