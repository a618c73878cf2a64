use nalgebra::DMatrix;
use sil_core::profiles::*;
use sil_core::DoubleWell;

const SQRT2_OVER_3: f64 = 0.471_404_520_791_031_7;

fn default_profile() -> (RhoGrid, DoubleWell, ProfileSolution) {
    let g = RhoGrid::default();
    let w = DoubleWell::default();
    let t = solve_theta0(&g, &w).unwrap();
    (g, w, t)
}

#[test]
fn theta0_matches_tanh() {
    let (g, _, t) = default_profile();
    let err = (0..g.len()).map(|i| (t.values[i] - (g.node(i) / 2f64.sqrt()).tanh()).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-8, "{err:e}");
    let derr = (0..g.len())
        .map(|i| (t.derivative[i] - (g.node(i) / 2f64.sqrt()).cosh().powi(-2) / 2f64.sqrt()).abs())
        .fold(0.0, f64::max);
    assert!(derr <= 1e-8, "{derr:e}");
}

#[test]
fn theta0_for_other_depths_is_rescaled_tanh() {
    let g = RhoGrid::new(20.0, 4001).unwrap();
    let w = DoubleWell::new(2.5);
    let t = solve_theta0(&g, &w).unwrap();
    let k = (w.beta / 2.0).sqrt();
    let err = (0..g.len()).map(|i| (t.values[i] - (k * g.node(i)).tanh()).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-7, "{err:e}");
}

#[test]
fn numerov_residual_is_small() {
    let (g, w, t) = default_profile();
    assert!(profile_residual(&g, &t.values, &w) <= 1e-9);
}

#[test]
fn tail_rate_below_linearized_rate() {
    let (_, w, t) = default_profile();
    assert!(t.decay_rate >= 1.3 && t.decay_rate < w.tail_rate(), "{}", t.decay_rate);
    let g = t.grid;
    for i in 0..g.len() {
        let r = g.node(i);
        if r.abs() >= 0.5 * g.half_width() {
            let far = if r < 0.0 { -1.0 } else { 1.0 };
            assert!((t.values[i] - far).abs() <= t.decay_constant * (-t.decay_rate * r.abs()).exp() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn moments_match_closed_forms() {
    let (g, _, t) = default_profile();
    let e = build_eta(&g);
    let m = compute_moments(&t, &e).unwrap();
    assert!((m.sigma - SQRT2_OVER_3).abs() <= 1e-7, "{}", m.sigma);
    assert!((m.int_theta0p - 2.0).abs() <= 1e-9);
    assert!((m.int_eta_theta0p - 1.0).abs() <= 1e-9);
    assert!(m.eta_orthogonality.abs() <= 1e-10);
    assert!(m.quad_error <= 1e-8);
    assert!((m.eta_tilde - 0.5 * m.k_eta).abs() < 1e-15);
    let other = build_eta(&RhoGrid::new(20.0, 2001).unwrap());
    assert!(compute_moments(&t, &other).is_err());
}

#[test]
fn sigma_converges_at_fourth_order_or_better() {
    // Errors on successively halved grids; the closed form is the oracle.
    let w = DoubleWell::default();
    let errs: Vec<f64> = [101usize, 201, 401]
        .iter()
        .map(|&n| {
            let g = RhoGrid::new(20.0, n).unwrap();
            let t = solve_theta0(&g, &w).unwrap();
            let m = compute_moments(&t, &build_eta(&g)).unwrap();
            (m.sigma - SQRT2_OVER_3).abs()
        })
        .collect();
    assert!(errs[0] / errs[1] > 12.0 && errs[1] / errs[2] > 12.0, "{errs:?}");
}

#[test]
fn theta1_is_even_and_orthogonal() {
    let (g, w, t) = default_profile();
    let m = compute_moments(&t, &build_eta(&g)).unwrap();
    let s = solve_theta1(&t, m.sigma, &w).unwrap();
    let n = g.len();
    for i in 0..n {
        assert!((s.profile.values[i] - s.profile.values[n - 1 - i]).abs() < 1e-10);
    }
    assert!(theta1_orthogonality(&t, &s.profile, &w).abs() <= 1e-7);
    assert!(s.solvability.abs() <= 1e-8);
    // far field −σ / f''(±1)
    assert!((s.profile.far_field.0 + m.sigma / 2.0).abs() < 1e-9);
    assert!((s.profile.far_field.1 + m.sigma / 2.0).abs() < 1e-9);
    assert!(s.residual <= 1e-8);
}

/// Independent oracle: assemble the full bordered matrix densely on a small
/// grid and solve it through the SVD pseudo-inverse.
#[test]
fn linearized_solver_matches_dense_pseudo_inverse() {
    let g = RhoGrid::new(16.0, 401).unwrap();
    let w = DoubleWell::default();
    let t = solve_theta0(&g, &w).unwrap();
    let e = build_eta(&g);
    let m = compute_moments(&t, &e).unwrap();
    let raw: Vec<f64> = g.coords().iter().map(|r| (r / 2.0).sin() * (-r * r / 8.0).exp() + 0.4).collect();
    let rhs = project_out_kernel(&t, &e, m.k_eta, &raw);
    let sol = solve_linearized(&t, &rhs, &w).unwrap();

    let n = g.len();
    let h = g.h();
    let k = h * h / 12.0;
    let mid = g.mid();
    let q: Vec<f64> = t.values.iter().map(|&v| w.d2f(v)).collect();
    let tp = &t.derivative;
    let mut a = DMatrix::<f64>::zeros(n + 1, n + 1);
    let mut b = nalgebra::DVector::<f64>::zeros(n + 1);
    for i in 0..n {
        if i == 0 || i == n - 1 {
            a[(i, i)] = -q[i];
            b[i] = rhs[i];
            continue;
        }
        a[(i, i - 1)] = 1.0 - k * q[i - 1];
        a[(i, i)] = -2.0 - 10.0 * k * q[i];
        a[(i, i + 1)] = 1.0 - k * q[i + 1];
        a[(i, n)] = k * (tp[i - 1] + 10.0 * tp[i] + tp[i + 1]);
        b[i] = k * (rhs[i - 1] + 10.0 * rhs[i] + rhs[i + 1]);
    }
    a[(n, mid)] = 1.0;
    let x = a.svd(true, true).solve(&b, 1e-14).unwrap();
    for i in 0..n {
        assert!((x[i] - sol.profile.values[i]).abs() < 1e-9, "{i}");
    }
    assert!((x[n] - sol.lambda).abs() < 1e-9);
}
