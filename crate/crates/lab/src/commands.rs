//! Subcommand bodies. Each one writes through a [`Sink`] and is skipped
//! when the manifest shows identical inputs and intact outputs.

use crate::config::{digest_hex, ExperimentConfig};
use crate::error::{at, LabError, LabResult, Outcome};
use crate::invariants;
use crate::manifest::{num, RunManifest, Sink};
use crate::pipeline::{self, residual_norms, NormRow};
use crate::plots;
use rayon::prelude::*;
use sil_core::diffuse;
use sil_core::geometry::{check_invariants, Circle, ClosedSpline, CosineMode, Curve, Domain, RadiusLaw, TubularChart};
use sil_core::profiles::{build_eta, compute_moments, solve_theta0, RhoGrid};
use sil_core::residuals::{fit_order, Dictionary};
use sil_core::sharp::{evolve_sharp, StepControl};
use sil_core::{DoubleWell, Vec2};
use std::path::{Path, PathBuf};

type Row = Vec<String>;

/// Splits `--out` into a root directory and a file name: a path ending in
/// `.csv` names the file, anything else is a directory.
pub fn file_target(out: &Path, default: &str) -> (PathBuf, String) {
    if out.extension().is_some_and(|e| e == "csv") {
        let root = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new(".")).to_path_buf();
        (root, out.file_name().unwrap_or_default().to_string_lossy().into_owned())
    } else {
        (out.to_path_buf(), default.to_string())
    }
}

/// Runs `body` unless the stage is current; records the stage afterwards.
pub fn guarded(root: &Path, stage: &str, inputs: &str, force: bool, body: impl FnOnce(&mut Sink) -> LabResult<bool>) -> LabResult<Outcome> {
    let hash = digest_hex(format!("{stage}\n{inputs}").as_bytes());
    if !force && RunManifest::load(root).is_current(root, stage, &hash) {
        return Ok(Outcome::UpToDate);
    }
    let mut sink = Sink::new(root, stage)?;
    let ok = body(&mut sink)?;
    sink.commit(&hash, ok)?;
    Ok(Outcome::from_pass(ok))
}

/// `profile`: θ0 as `rho, value, derivative`.
pub fn profile(beta: f64, half_width: f64, nodes: usize, out: &Path, force: bool) -> LabResult<Outcome> {
    let (root, file) = file_target(out, "profile.csv");
    let inputs = format!("{beta} {half_width} {nodes} {file}");
    guarded(&root, "profile", &inputs, force, |sink| {
        let grid = RhoGrid::new(half_width, nodes).map_err(|e| LabError::Usage(e.to_string()))?;
        let p = solve_theta0(&grid, &DoubleWell { beta }).map_err(at("profile"))?;
        let rows: Vec<Row> = (0..grid.len()).map(|i| vec![num(grid.node(i)), num(p.values[i]), num(p.derivative[i])]).collect();
        sink.csv(&file, &["rho", "value", "derivative"], &rows)?;
        Ok(true)
    })
}

/// Arguments of `geometry-check`.
#[derive(Debug, Clone)]
pub struct GeometryArgs {
    /// `circle` or `ellipse`.
    pub scenario: String,
    /// Radius (semi-axis along `x₁` for the ellipse).
    pub radius: f64,
    /// Domain radius.
    pub r_out: f64,
    /// Tube parameter.
    pub delta: f64,
    /// Random points.
    pub samples: usize,
    /// Seed.
    pub seed: u64,
}

/// `geometry-check`: chart identities on random tube points.
pub fn geometry_check(a: &GeometryArgs, out: &Path, force: bool) -> LabResult<Outcome> {
    let (root, file) = file_target(out, "geometry.csv");
    let inputs = format!("{a:?} {file}");
    guarded(&root, "geometry-check", &inputs, force, |sink| {
        let domain = Domain::Disk { center: Vec2::default(), radius: a.r_out };
        let rows = match a.scenario.as_str() {
            "circle" => geometry_rows(TubularChart::new(Circle::new(Vec2::default(), a.radius), a.delta, domain, &[0.0]), a),
            "ellipse" => {
                let pts: Vec<Vec2> = (0..64)
                    .map(|k| Vec2::polar(1.0, std::f64::consts::TAU * k as f64 / 64.0))
                    .map(|p| Vec2::new(a.radius * p.x, 0.75 * a.radius * p.y))
                    .collect();
                let curve = ClosedSpline::new(&pts).map_err(at("geometry"))?;
                geometry_rows(TubularChart::new(curve, a.delta, domain, &[0.0]), a)
            }
            s => return Err(LabError::Usage(format!("unknown geometry scenario `{s}`"))),
        };
        let pass = rows.iter().all(|r| r[3] == "pass");
        sink.csv(&file, &["check", "value", "tolerance", "status"], &rows)?;
        Ok(pass)
    })
}

fn geometry_rows<C: Curve>(chart: sil_core::Result<TubularChart<C>>, a: &GeometryArgs) -> Vec<Row> {
    let row = |name: &str, v: f64, tol: f64| vec![name.to_string(), num(v), num(tol), if v <= tol { "pass" } else { "fail" }.to_string()];
    let chart = match chart {
        Ok(c) => c,
        Err(e) => return vec![vec![format!("chart: {e}"), "NaN".into(), "0".into(), "fail".into()]],
    };
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed);
    let pts: Vec<Vec2> = (0..a.samples)
        .map(|_| {
            let s: f64 = rng.random();
            let d = (2.0 * rng.random::<f64>() - 1.0) * 1.9 * a.delta;
            chart.curve.point(s, 0.0) + chart.normal(s, 0.0) * d
        })
        .collect();
    let h = CosineMode { amplitude: 0.3, mode: 2.0, growth: 0.5 };
    match check_invariants(&chart, &h, &pts, 0.0, 0.05) {
        Ok(r) => vec![
            row("grad_d_unit", r.grad_d_unit, 1e-5),
            row("grad_s_orthogonal", r.grad_s_orthogonal, 1e-5),
            row("chain_rule", r.chain_rule, 1e-5),
            row("decomposition", r.decomposition, 1e-10),
            row("jacobian", r.jacobian, 1e-8),
            row("normal_velocity", r.normal_velocity, 1e-6),
            row("surface_laplacian", r.surface_laplacian, 1e-4),
        ],
        Err(e) => vec![vec![format!("invariants: {e}"), "NaN".into(), "0".into(), "fail".into()]],
    }
}

/// `sharp`: `t, R, dRdt, mu_interface` on a uniform time grid.
pub fn sharp(beta: f64, r0: f64, r_out: f64, t_end: f64, samples: usize, out: &Path, force: bool) -> LabResult<Outcome> {
    let (root, file) = file_target(out, "sharp.csv");
    let inputs = format!("{beta} {r0} {r_out} {t_end} {samples} {file}");
    guarded(&root, "sharp", &inputs, force, |sink| {
        let sigma = surface_tension(beta)?;
        let tr = evolve_sharp(r0, r_out, sigma, t_end, StepControl::default()).map_err(at("sharp"))?;
        sink.csv(&file, &["t", "R", "dRdt", "mu_interface"], &sharp_rows(&tr, sigma, t_end, samples))?;
        Ok(true)
    })
}

fn sharp_rows(tr: &impl RadiusLaw, sigma: f64, t_end: f64, samples: usize) -> Vec<Row> {
    let n = samples.max(2) - 1;
    (0..=n)
        .map(|k| {
            let t = t_end * k as f64 / n as f64;
            let r = tr.radius(t);
            vec![num(t), num(r), num(tr.rate(t)), num(sigma / r)]
        })
        .collect()
}

/// `σ` from the moment table of the default profile grid.
pub fn surface_tension(beta: f64) -> LabResult<f64> {
    let grid = RhoGrid::default();
    let theta0 = solve_theta0(&grid, &DoubleWell { beta }).map_err(at("profile"))?;
    Ok(compute_moments(&theta0, &build_eta(&grid)).map_err(at("profile"))?.sigma)
}

/// `approx`: the glued fields on a Cartesian grid restricted to `Ω`.
pub fn approx(cfg: &ExperimentConfig, eps: f64, t: f64, grid: usize, out: &Path, force: bool) -> LabResult<Outcome> {
    let (root, file) = file_target(out, "approx.csv");
    let inputs = format!("{}{eps} {t} {grid} {file}", cfg.to_text());
    guarded(&root, "approx", &inputs, force, |sink| {
        let sc = cfg.scenario()?;
        let prepared = sc.prepare().map_err(at("sharp"))?;
        let field = sc.field(&prepared, eps).map_err(at("approx"))?;
        let n = grid.max(2);
        let mut rows = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let x = Vec2::new(-cfg.r_out + 2.0 * cfg.r_out * i as f64 / (n - 1) as f64, -cfg.r_out + 2.0 * cfg.r_out * j as f64 / (n - 1) as f64);
                if x.norm() > cfg.r_out {
                    continue;
                }
                let s = field.eval(x, t).map_err(at("approx"))?;
                rows.push(vec![num(x.x), num(x.y), num(s.d_gamma), num(s.rho), num(s.c), num(s.mu), num(s.v.x), num(s.v.y), num(s.p)]);
            }
        }
        sink.csv(&file, &["x1", "x2", "d_gamma", "rho", "cA", "muA", "vA1", "vA2", "pA"], &rows)?;
        Ok(true)
    })
}

/// `diffuse`: one radial run with history and snapshots.
pub fn diffuse(cfg: &ExperimentConfig, eps: f64, out: &Path, force: bool) -> LabResult<Outcome> {
    let inputs = format!("{}{eps}", cfg.to_text());
    guarded(out, "diffuse", &inputs, force, |sink| {
        let sc = cfg.scenario()?;
        let prepared = sc.prepare().map_err(at("sharp"))?;
        let field = sc.field(&prepared, eps).map_err(at("approx"))?;
        let run = pipeline::diffuse_run(cfg, &field, eps)?;
        write_history(sink, "history.csv", &run)?;
        for (k, s) in run.snapshots.iter().enumerate() {
            let rows: Vec<Row> = (0..=run.grid.intervals()).map(|i| vec![num(run.grid.r(i)), num(s.c[i]), num(s.mu[i])]).collect();
            sink.csv(&format!("snapshot_{k:03}.csv"), &["r", "c", "mu"], &rows)?;
        }
        Ok(run.energy_increases(0.0) == 0 && run.boundary_defect == 0.0)
    })
}

fn write_history(sink: &mut Sink, file: &str, run: &diffuse::DiffuseRun) -> LabResult<()> {
    let rows: Vec<Row> = run.history.iter().map(|h| vec![num(h.t), num(h.radius), num(h.energy), num(h.mass)]).collect();
    sink.csv(file, &["t", "R_eps", "energy", "mass"], &rows)?;
    Ok(())
}

fn norm_rows(norms: &[NormRow]) -> Vec<Row> {
    norms.iter().map(|r| vec![num(r.eps), r.name.clone(), r.stratum.clone(), num(r.value)]).collect()
}

fn order_rows(eps: &[f64], norms: &[NormRow]) -> Vec<Row> {
    let mut keys: Vec<(String, String)> = Vec::new();
    for r in norms {
        if !keys.iter().any(|k| k.0 == r.name && k.1 == r.stratum) {
            keys.push((r.name.clone(), r.stratum.clone()));
        }
    }
    keys.into_iter()
        .filter_map(|(name, stratum)| {
            let vals: Vec<f64> = eps
                .iter()
                .filter_map(|e| norms.iter().find(|r| r.eps == *e && r.name == name && r.stratum == stratum).map(|r| r.value))
                .collect();
            fit_order(eps, &vals).ok().map(|f| vec![format!("{name}[{stratum}]"), num(f.slope), num(f.residual)])
        })
        .collect()
}

const ORDER_HEADER: [&str; 3] = ["norm_name", "slope", "fit_residual"];
const NORM_HEADER: [&str; 4] = ["eps", "norm_name", "stratum", "value"];

/// `residuals`: residual norms and fitted orders over the `ε` list.
pub fn residuals(cfg: &ExperimentConfig, threads: usize, out: &Path, force: bool) -> LabResult<Outcome> {
    cfg.validate()?;
    guarded(out, "residuals", &cfg.hash(), force, |sink| {
        let sc = cfg.scenario()?;
        let prepared = sc.prepare().map_err(at("sharp"))?;
        let dict = Dictionary::standard(cfg.r_out);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| LabError::Usage(e.to_string()))?;
        let per: Vec<Vec<NormRow>> = pool.install(|| {
            cfg.eps
                .par_iter()
                .map(|&e| {
                    let f = sc.field(&prepared, e).map_err(at("approx"))?;
                    residual_norms(cfg, &f, &dict)
                })
                .collect::<LabResult<_>>()
        })?;
        let norms: Vec<NormRow> = per.into_iter().flatten().collect();
        sink.csv("norms.csv", &NORM_HEADER, &norm_rows(&norms))?;
        sink.csv("orders.csv", &ORDER_HEADER, &order_rows(&cfg.eps, &norms))?;
        Ok(true)
    })
}

/// Curves shown in the convergence plot.
pub const PLOTTED: [(&str, &str); 5] = [
    ("R.sup_radius", "all"),
    ("R.main1", "all"),
    ("r_CH2.linf", "outer"),
    ("r_CH2.l2", "interface"),
    ("r_CH1.weak", "all"),
];

/// `converge`: the full study; exit status follows the thresholds.
pub fn converge(cfg: &ExperimentConfig, threads: usize, out: &Path, force: bool) -> LabResult<Outcome> {
    cfg.validate_for_fit()?;
    guarded(out, "converge", &cfg.hash(), force, |sink| {
        let study = pipeline::converge(cfg, threads)?;
        let norms: Vec<NormRow> = study.reports.iter().flat_map(|r| r.norms.iter().cloned()).collect();
        sink.csv("norms.csv", &NORM_HEADER, &norm_rows(&norms))?;
        sink.csv("orders.csv", &ORDER_HEADER, &order_rows(&cfg.eps, &norms))?;
        let mut histories = Vec::new();
        for r in &study.reports {
            let file = format!("history_eps{}.csv", r.eps);
            write_history(sink, &file, &r.run)?;
            histories.push((r.eps, file));
        }
        sink.csv("sharp.csv", &["t", "R", "dRdt", "mu_interface"], &sharp_rows(study.sharp.as_ref(), study.sharp.sigma, cfg.t_end, 201))?;
        let mut header = vec!["eps".to_string()];
        header.extend(PLOTTED.iter().map(|(n, s)| format!("{n}[{s}]")));
        let curves: Vec<Row> = study
            .reports
            .iter()
            .map(|r| std::iter::once(num(r.eps)).chain(PLOTTED.iter().map(|(n, s)| num(r.norm(n, s).unwrap_or(f64::NAN)))).collect())
            .collect();
        let hdr: Vec<&str> = header.iter().map(String::as_str).collect();
        sink.csv("curves.csv", &hdr, &curves)?;
        sink.write("convergence.gp", plots::convergence_script(&header[1..]).as_bytes())?;
        sink.write("radius.gp", plots::radius_script(&histories).as_bytes())?;
        sink.write("summary.txt", summary(cfg, &study).as_bytes())?;
        Ok(study.passed())
    })
}

/// Human-readable study summary.
pub fn summary(cfg: &ExperimentConfig, study: &pipeline::Study) -> String {
    let mut s = String::from("# configuration\n");
    s += &cfg.to_text();
    s += "\n# runs\neps,steps,halvings,max_newton,sup_radius_error,main1,seconds\n";
    for r in &study.reports {
        let it = r.run.history.iter().map(|h| h.iterations).max().unwrap_or(0);
        s += &format!(
            "{},{},{},{},{:.4e},{:.4e},{:.2}\n",
            r.eps,
            r.run.history.len() - 1,
            r.run.halvings,
            it,
            r.errors.sup_radius,
            r.errors.main1,
            r.seconds
        );
    }
    s += "\n# fitted orders\n";
    for (n, st) in PLOTTED {
        if let Some(v) = study.slope(n, st) {
            s += &format!("slope({n}[{st}]) = {v:.4}\n");
        }
    }
    s += "\n# thresholds\n";
    for c in &study.criteria {
        s += &format!("{c}\n");
    }
    s
}

/// `invariants`: every suite (or the filtered ones) as a pass/fail table.
pub fn invariants(cfg: &ExperimentConfig, filter: Option<&[String]>, out: &Path, force: bool) -> LabResult<Outcome> {
    if let Some(f) = filter {
        if let Some(bad) = f.iter().find(|s| !invariants::SUITES.contains(&s.as_str())) {
            return Err(LabError::Usage(format!("unknown suite `{bad}`")));
        }
    }
    let inputs = format!("{}{:?}", cfg.to_text(), filter);
    guarded(out, "invariants", &inputs, force, |sink| {
        let rows = invariants::run(cfg, filter);
        let table: Vec<Row> = rows
            .iter()
            .map(|c| vec![c.suite.to_string(), c.name.clone(), num(c.value), num(c.tolerance), if c.pass { "pass" } else { "fail" }.into()])
            .collect();
        sink.csv("invariants.csv", &["suite", "check", "value", "tolerance", "status"], &table)?;
        Ok(rows.iter().all(|c| c.pass))
    })
}
