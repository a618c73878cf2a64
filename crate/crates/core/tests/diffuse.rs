use proptest::prelude::*;
use sil_core::diffuse::*;
use sil_core::expansion::*;
use sil_core::geometry::RadiusLaw;
use sil_core::{DoubleWell, Error, Vec2};

fn tanh_state(g: &RadialGrid, eps: f64, r0: f64, bump: f64, k: f64) -> RadialState {
    RadialState::from_profile(g, 0.0, eps, &DoubleWell::default(), |r| {
        ((r0 - r) / (2f64.sqrt() * eps)).tanh() + bump * (k * r).cos() * (-(r - r0).powi(2) / 0.02).exp()
    })
}

#[test]
fn radius_follows_sharp_limit() {
    let sc = RadialScenario::new(1.0, 2.0, 0.05);
    let p = sc.prepare().unwrap();
    let mut sups = Vec::new();
    for &eps in &[0.08, 0.04] {
        let f = sc.field(&p, eps).unwrap();
        let g = RadialGrid::for_eps(2.0, eps).unwrap();
        let prm = DiffuseParams::for_eps(eps, 0.05);
        let init = RadialState::from_profile(&g, 0.0, eps, &prm.well, |r| f.c(Vec2::new(r, 0.0), 0.0).unwrap());
        let run = run(&g, init, &prm, 0.05, &[0.0, 0.05]).unwrap();
        assert_eq!(run.snapshots.len(), 2);
        assert_eq!(run.snapshots[1].t, 0.05);
        let sup = run.history.iter().map(|h| (h.radius - p.trajectory.radius(h.t)).abs()).fold(0.0, f64::max);
        sups.push(sup);
    }
    assert!(sups[0] < 5e-3 && sups[1] < 0.6 * sups[0], "{sups:?}");
}

#[test]
fn boundary_rows_and_mass_balance_are_exact() {
    let eps = 0.08;
    let g = RadialGrid::for_eps(2.0, eps).unwrap();
    let prm = DiffuseParams::for_eps(eps, 0.02);
    let run = run(&g, tanh_state(&g, eps, 1.0, 0.0, 0.0), &prm, 0.02, &[0.01]).unwrap();
    assert_eq!(run.boundary_defect, 0.0);
    assert!(run.mass_defect < 1e-12, "{}", run.mass_defect);
    for s in &run.snapshots {
        assert_eq!(s.c[g.intervals()], -1.0);
        assert_eq!(s.mu[g.intervals()], 0.0);
    }
    // the drop shrinks mass through the boundary
    let m0 = run.history[0].mass;
    let m1 = run.history.last().unwrap().mass;
    assert!(m1 < m0);
}

#[test]
fn energy_never_increases_on_smooth_data() {
    let eps = 0.08;
    let g = RadialGrid::for_eps(2.0, eps).unwrap();
    let prm = DiffuseParams::for_eps(eps, 0.05);
    let run = run(&g, tanh_state(&g, eps, 1.0, 0.0, 0.0), &prm, 0.05, &[]).unwrap();
    assert_eq!(run.energy_increases(0.0), 0);
    assert!(run.history.last().unwrap().energy < run.history[0].energy);
}

#[test]
fn coarse_grid_is_rejected() {
    let g = RadialGrid::new(2.0, 20).unwrap();
    let prm = DiffuseParams::for_eps(0.08, 0.01);
    let e = run(&g, tanh_state(&g, 0.08, 1.0, 0.0, 0.0), &prm, 0.01, &[]);
    assert!(matches!(e, Err(Error::ResolutionTooCoarse { .. })));
}

#[test]
fn step_failure_is_reported() {
    let eps = 0.08;
    let g = RadialGrid::for_eps(2.0, eps).unwrap();
    let mut prm = DiffuseParams::for_eps(eps, 1.0);
    prm.max_newton = 1;
    prm.max_halvings = 0;
    let s = tanh_state(&g, eps, 1.0, 0.3, 9.0);
    assert!(matches!(step(&g, &s, 1.0, &prm), Err(Error::StepFailed { .. })));
}

#[test]
fn discrete_chemical_potential_of_constant_state() {
    let g = RadialGrid::new(2.0, 200).unwrap();
    let w = DoubleWell::default();
    let c = vec![0.3; 201];
    let mu = chemical_potential(&g, &c, 0.1, &w);
    for m in &mu[..199] {
        assert!((m - w.df(0.3) / 0.1).abs() < 1e-12);
    }
    assert_eq!(mu[200], 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]
    #[test]
    fn energy_is_monotone_for_perturbed_profiles(r0 in 0.7f64..1.3, bump in -0.2f64..0.2, k in 1.0f64..20.0) {
        let eps = 0.1;
        let g = RadialGrid::for_eps(2.0, eps).unwrap();
        let prm = DiffuseParams::for_eps(eps, 0.01);
        let run = run(&g, tanh_state(&g, eps, r0, bump, k), &prm, 0.01, &[]).unwrap();
        prop_assert_eq!(run.energy_increases(1e-13), 0);
    }
}
