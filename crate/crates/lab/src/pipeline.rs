//! Per-`ε` pipelines and the convergence study built from them.

use crate::config::ExperimentConfig;
use crate::error::{at, LabError, LabResult};
use rayon::prelude::*;
use sil_core::diffuse::{self, DiffuseParams, DiffuseRun, RadialGrid, RadialState};
use sil_core::expansion::{spectral_check, ApproxField, Prepared, RadialScenario, SpectralReport};
use sil_core::residuals::{boundary_defect, error_norms, fit_order, Dictionary, ErrorNorms, EvalGrid, OrderFit, ResidualField, Stratum, Which};
use sil_core::sharp::SharpTrajectory;
use sil_core::Vec2;
use std::sync::Arc;
use std::time::Instant;

/// One measured norm.
#[derive(Debug, Clone, PartialEq)]
pub struct NormRow {
    /// Interface width.
    pub eps: f64,
    /// Norm name, e.g. `r_CH2.linf`.
    pub name: String,
    /// Stratum name, `outer` or `all`.
    pub stratum: String,
    /// Value.
    pub value: f64,
}

/// Everything measured for one `ε`.
#[derive(Debug, Clone)]
pub struct EpsReport {
    /// Interface width.
    pub eps: f64,
    /// Residual and error norms.
    pub norms: Vec<NormRow>,
    /// Error norms against the diffuse run.
    pub errors: ErrorNorms,
    /// Spectral quantities of the approximate solution.
    pub spectral: SpectralReport,
    /// `max |c_A + 1| + |μ_A|` on `∂Ω`.
    pub field_boundary_defect: f64,
    /// The diffuse run.
    pub run: DiffuseRun,
    /// Wall time in seconds.
    pub seconds: f64,
}

impl EpsReport {
    /// Looks up a norm.
    pub fn norm(&self, name: &str, stratum: &str) -> Option<f64> {
        self.norms.iter().find(|r| r.name == name && r.stratum == stratum).map(|r| r.value)
    }
}

/// Uniform snapshot times on `[0, T]`.
pub fn snapshot_times(t_end: f64, count: usize) -> Vec<f64> {
    let n = count.max(2) - 1;
    (0..=n).map(|k| t_end * k as f64 / n as f64).collect()
}

/// Diffuse run started from the approximate solution at `t = 0`.
pub fn diffuse_run(cfg: &ExperimentConfig, field: &ApproxField, eps: f64) -> LabResult<DiffuseRun> {
    let grid = match cfg.diffuse_intervals {
        Some(n) => RadialGrid::new(cfg.r_out, n),
        None => RadialGrid::for_eps(cfg.r_out, eps),
    }
    .map_err(at("diffuse"))?;
    let mut prm = DiffuseParams::for_eps(eps, cfg.t_end);
    prm.well = field.profiles.well;
    let bad = std::cell::RefCell::new(None);
    let init = RadialState::from_profile(&grid, 0.0, eps, &prm.well, |r| {
        field.c(Vec2::new(r, 0.0), 0.0).unwrap_or_else(|e| {
            *bad.borrow_mut() = Some(e);
            f64::NAN
        })
    });
    if let Some(e) = bad.into_inner() {
        return Err(at("diffuse")(e));
    }
    diffuse::run(&grid, init, &prm, cfg.t_end, &snapshot_times(cfg.t_end, cfg.snapshots)).map_err(at("diffuse"))
}

fn push(rows: &mut Vec<NormRow>, eps: f64, name: &str, stratum: &str, value: f64) {
    rows.push(NormRow { eps, name: name.into(), stratum: stratum.into(), value });
}

/// Residual norms of the approximate solution alone.
pub fn residual_norms(cfg: &ExperimentConfig, field: &ApproxField, dict: &Dictionary) -> LabResult<Vec<NormRow>> {
    let eps = field.eps;
    let grid = EvalGrid { n_r: cfg.eval_nr, n_t: cfg.eval_nt, t_end: cfg.t_end };
    let mut rows = Vec::new();
    for which in Which::ALL {
        let r = ResidualField::evaluate(field, which, &grid).map_err(at("residuals"))?;
        let name = which.name();
        for s in Stratum::ALL {
            push(&mut rows, eps, &format!("{name}.linf"), s.name(), r.linf(&[s]));
            push(&mut rows, eps, &format!("{name}.l2"), s.name(), r.l2(&[s]));
        }
        push(&mut rows, eps, &format!("{name}.linf"), "outer", r.linf(&Stratum::OUTER));
        push(&mut rows, eps, &format!("{name}.linf"), "all", r.linf(&Stratum::ALL));
        push(&mut rows, eps, &format!("{name}.l2"), "all", r.l2(&Stratum::ALL));
        push(&mut rows, eps, &format!("{name}.weak"), "all", r.weak(dict));
    }
    Ok(rows)
}

/// Runs the full pipeline for one `ε`.
pub fn run_eps(cfg: &ExperimentConfig, sc: &RadialScenario, prepared: &Prepared, eps: f64) -> LabResult<EpsReport> {
    let start = Instant::now();
    let field = sc.field(prepared, eps).map_err(at("approx"))?;
    let dict = Dictionary::standard(cfg.r_out);
    let mut norms = residual_norms(cfg, &field, &dict)?;
    let times = snapshot_times(cfg.t_end, 11);
    let spectral = spectral_check(&field, &times, 400).map_err(at("approx"))?;
    let field_boundary_defect = boundary_defect(&field, &times, 64).map_err(at("approx"))?;
    let run = diffuse_run(cfg, &field, eps)?;
    let errors = error_norms(&run, &field, &dict).map_err(at("residuals"))?;
    for (name, v) in [
        ("R.main1", errors.main1),
        ("R.main2", errors.main2),
        ("R.main3", errors.main3),
        ("R.main4", errors.main4),
        ("R.main5", errors.main5),
        ("R.main6", errors.main6),
        ("R.dual_sup", errors.dual_sup),
        ("R.sup_radius", errors.sup_radius),
        ("R.paired_rch2", errors.paired_rch2),
    ] {
        push(&mut norms, eps, name, "all", v);
    }
    Ok(EpsReport { eps, norms, errors, spectral, field_boundary_defect, run, seconds: start.elapsed().as_secs_f64() })
}

/// One pass/fail line.
#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    /// Number in the acceptance list.
    pub id: u8,
    /// Short description.
    pub name: String,
    /// Outcome.
    pub pass: bool,
    /// Measured values.
    pub detail: String,
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {:>2} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }
}

/// Reports for all `ε`, fitted orders and the threshold checks.
#[derive(Debug, Clone)]
pub struct Study {
    /// Reports in config order.
    pub reports: Vec<EpsReport>,
    /// `(name, stratum, fit)` for every norm that is positive for all `ε`.
    pub fits: Vec<(String, String, OrderFit)>,
    /// Thresholds checked by the study.
    pub criteria: Vec<Criterion>,
    /// Sharp-interface trajectory shared by all runs.
    pub sharp: Arc<SharpTrajectory>,
}

impl Study {
    /// Fitted order of a norm.
    pub fn slope(&self, name: &str, stratum: &str) -> Option<f64> {
        self.fits.iter().find(|f| f.0 == name && f.1 == stratum).map(|f| f.2.slope)
    }

    /// True when every criterion passed.
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }
}

fn fits(reports: &[EpsReport]) -> Vec<(String, String, OrderFit)> {
    let eps: Vec<f64> = reports.iter().map(|r| r.eps).collect();
    let mut out = Vec::new();
    for row in &reports[0].norms {
        let vals: Option<Vec<f64>> = reports.iter().map(|r| r.norm(&row.name, &row.stratum)).collect();
        if let Some(Ok(f)) = vals.map(|v| fit_order(&eps, &v)) {
            out.push((row.name.clone(), row.stratum.clone(), f));
        }
    }
    out
}

fn slope_text(s: Option<f64>) -> String {
    s.map_or("n/a".into(), |v| format!("{v:.3}"))
}

fn criteria(study: &Study) -> Vec<Criterion> {
    let r = &study.reports;
    let s6 = study.slope("R.sup_radius", "all");
    let sups: Vec<String> = r.iter().map(|x| format!("{:.3e}", x.errors.sup_radius)).collect();
    let s7a = study.slope("r_CH2.linf", "outer");
    let s7b = study.slope("r_CH2.l2", "interface");
    let s7d = study.slope("r_CH1.weak", "all");
    let div = r.iter().filter_map(|x| x.norm("r_div.linf", "all")).fold(0.0, f64::max);
    let fb = r.iter().map(|x| x.field_boundary_defect).fold(0.0, f64::max);
    let rb = r.iter().map(|x| x.run.boundary_defect).fold(0.0, f64::max);
    let cstar = r.iter().map(|x| x.spectral.c_star).fold(0.0, f64::max);
    let pq = r.iter().map(|x| x.spectral.pq_bound).fold(0.0, f64::max);
    let steps: usize = r.iter().map(|x| x.run.history.len() - 1).sum();
    let inc: usize = r.iter().map(|x| x.run.energy_increases(0.0)).sum();
    let at_least = |s: Option<f64>, floor: f64| s.is_some_and(|v| v >= floor);
    vec![
        Criterion {
            id: 6,
            name: "interface radius converges".into(),
            pass: at_least(s6, 0.9),
            detail: format!("sup|R_eps - R| = [{}], slope {} (>= 0.9)", sups.join(", "), slope_text(s6)),
        },
        Criterion {
            id: 7,
            name: "residual orders".into(),
            pass: at_least(s7a, 1.8) && at_least(s7b, 0.9) && div <= 1e-14 && at_least(s7d, 0.9),
            detail: format!(
                "r_CH2 Linf(outer) slope {} (>= 1.8), r_CH2 L2(interface) slope {} (>= 0.9), max|r_div| {div:e}, r_CH1 weak slope {} (>= 0.9)",
                slope_text(s7a),
                slope_text(s7b),
                slope_text(s7d)
            ),
        },
        Criterion {
            id: 8,
            name: "boundary conditions".into(),
            pass: fb <= 1e-12 && rb == 0.0,
            detail: format!("approximate field {fb:e} (<= 1e-12), diffuse boundary rows {rb:e}"),
        },
        Criterion {
            id: 9,
            name: "spectral assumption".into(),
            pass: cstar <= 1.0 && pq.is_finite(),
            detail: format!("C* = {cstar:.6}, pq bound = {pq:.4}"),
        },
        Criterion {
            id: 10,
            name: "energy dissipation".into(),
            pass: inc == 0 && steps > 0,
            detail: format!("{inc} increases over {steps} accepted steps"),
        },
    ]
}

/// Runs every `ε` of `cfg` (in parallel on `threads` workers, `0` = all
/// cores) and checks the convergence thresholds.
pub fn converge(cfg: &ExperimentConfig, threads: usize) -> LabResult<Study> {
    cfg.validate_for_fit()?;
    let sc = cfg.scenario()?;
    let prepared = sc.prepare().map_err(at("sharp"))?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| LabError::Usage(e.to_string()))?;
    let reports = pool.install(|| cfg.eps.par_iter().map(|&e| run_eps(cfg, &sc, &prepared, e)).collect::<LabResult<Vec<_>>>())?;
    let mut study = Study { fits: fits(&reports), reports, criteria: Vec::new(), sharp: prepared.trajectory.clone() };
    study.criteria = criteria(&study);
    Ok(study)
}
