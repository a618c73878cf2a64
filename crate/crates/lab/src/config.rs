//! Experiment configuration in flat `key = value` form.
//!
//! Lines starting with `#` are comments. Unknown keys are rejected so that
//! typos do not silently fall back to defaults.

use crate::error::{LabError, LabResult};
use sha2::{Digest, Sha256};
use sil_core::expansion::RadialScenario;
use sil_core::profiles::RhoGrid;
use sil_core::DoubleWell;
use std::fmt::Write as _;
use std::path::PathBuf;

/// Parameters of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Scenario id; only `radial` is supported.
    pub scenario: String,
    /// Well depth `β`.
    pub beta: f64,
    /// Initial radius.
    pub r0: f64,
    /// Domain radius.
    pub r_out: f64,
    /// Tube parameter; `None` picks the largest admissible default.
    pub delta: Option<f64>,
    /// Interface widths, strictly decreasing.
    pub eps: Vec<f64>,
    /// Final time.
    pub t_end: f64,
    /// Half-width of the profile grid.
    pub rho_half_width: f64,
    /// Nodes of the profile grid.
    pub rho_nodes: usize,
    /// Radial intervals of the diffuse grid; `None` uses `⌈8 R_out/ε⌉`.
    pub diffuse_intervals: Option<usize>,
    /// Snapshots stored per diffuse run (including `t = 0` and `T`).
    pub snapshots: usize,
    /// Minimum residual samples per stratum and time.
    pub eval_nr: usize,
    /// Residual sample times.
    pub eval_nt: usize,
    /// Seed for randomized sample points.
    pub seed: u64,
    /// Boundary friction coefficient; carried for completeness, unused radially.
    pub alpha0: f64,
    /// Include the second outer correction.
    pub outer_c2: bool,
    /// Output directory.
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: "radial".into(),
            beta: 1.0,
            r0: 1.0,
            r_out: 2.0,
            delta: None,
            eps: vec![0.08, 0.04, 0.02],
            t_end: 0.05,
            rho_half_width: 20.0,
            rho_nodes: 4001,
            diffuse_intervals: None,
            snapshots: 11,
            eval_nr: 128,
            eval_nt: 16,
            seed: 1,
            alpha0: 1.0,
            outer_c2: true,
            out: PathBuf::from("out"),
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> LabResult<T> {
    v.parse().map_err(|_| LabError::Usage(format!("cannot parse `{key} = {v}`")))
}

/// Parses a comma-separated list of positive numbers.
pub fn parse_eps_list(v: &str) -> LabResult<Vec<f64>> {
    v.split(',').map(|s| parse::<f64>("eps", s.trim())).collect()
}

fn optional<T: std::str::FromStr>(key: &str, v: &str) -> LabResult<Option<T>> {
    if v == "auto" { Ok(None) } else { parse(key, v).map(Some) }
}

fn show<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "auto".to_string(), |x| x.to_string())
}

impl ExperimentConfig {
    /// Parses `key = value` text on top of the defaults.
    pub fn parse(text: &str) -> LabResult<Self> {
        let mut c = Self::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| LabError::Usage(format!("line {}: expected key = value", no + 1)))?;
            c.set(k.trim(), v.trim())?;
        }
        Ok(c)
    }

    /// Reads a config file.
    pub fn load(path: &std::path::Path) -> LabResult<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Sets one key.
    pub fn set(&mut self, k: &str, v: &str) -> LabResult<()> {
        match k {
            "scenario" => self.scenario = v.to_string(),
            "beta" => self.beta = parse(k, v)?,
            "r0" => self.r0 = parse(k, v)?,
            "r_out" => self.r_out = parse(k, v)?,
            "delta" => self.delta = optional(k, v)?,
            "eps" => self.eps = parse_eps_list(v)?,
            "t_end" => self.t_end = parse(k, v)?,
            "rho_half_width" => self.rho_half_width = parse(k, v)?,
            "rho_nodes" => self.rho_nodes = parse(k, v)?,
            "diffuse_intervals" => self.diffuse_intervals = optional(k, v)?,
            "snapshots" => self.snapshots = parse(k, v)?,
            "eval_nr" => self.eval_nr = parse(k, v)?,
            "eval_nt" => self.eval_nt = parse(k, v)?,
            "seed" => self.seed = parse(k, v)?,
            "alpha0" => self.alpha0 = parse(k, v)?,
            "outer_c2" => self.outer_c2 = parse(k, v)?,
            "out" => self.out = PathBuf::from(v),
            _ => return Err(LabError::Usage(format!("unknown key `{k}`"))),
        }
        Ok(())
    }

    /// Canonical text; parsing it gives back the same config.
    pub fn to_text(&self) -> String {
        let eps: Vec<String> = self.eps.iter().map(|e| e.to_string()).collect();
        let mut s = String::new();
        let rows: [(&str, String); 17] = [
            ("scenario", self.scenario.clone()),
            ("beta", self.beta.to_string()),
            ("r0", self.r0.to_string()),
            ("r_out", self.r_out.to_string()),
            ("delta", show(&self.delta)),
            ("eps", eps.join(",")),
            ("t_end", self.t_end.to_string()),
            ("rho_half_width", self.rho_half_width.to_string()),
            ("rho_nodes", self.rho_nodes.to_string()),
            ("diffuse_intervals", show(&self.diffuse_intervals)),
            ("snapshots", self.snapshots.to_string()),
            ("eval_nr", self.eval_nr.to_string()),
            ("eval_nt", self.eval_nt.to_string()),
            ("seed", self.seed.to_string()),
            ("alpha0", self.alpha0.to_string()),
            ("outer_c2", self.outer_c2.to_string()),
            ("out", self.out.display().to_string()),
        ];
        for (k, v) in rows {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// SHA-256 of the canonical text without the output directory.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        digest_hex(c.to_text().as_bytes())
    }

    /// Tube parameter in use.
    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or_else(|| RadialScenario::default_delta(self.r0, self.r_out))
    }

    /// Checks everything that does not need a fit.
    pub fn validate(&self) -> LabResult<()> {
        let bad = |m: String| Err(LabError::Usage(m));
        if self.scenario != "radial" {
            return bad(format!("unsupported scenario `{}`", self.scenario));
        }
        if !(self.beta > 0.0 && self.r0 > 0.0 && self.r_out > self.r0 && self.t_end > 0.0) {
            return bad("need beta > 0, 0 < r0 < r_out and t_end > 0".into());
        }
        if self.eps.is_empty() || self.eps.iter().any(|e| !(*e > 0.0)) {
            return bad("eps values must be positive".into());
        }
        if self.eps.windows(2).any(|w| w[1] >= w[0]) {
            return bad("eps list must be strictly decreasing".into());
        }
        let d = self.delta();
        if !(d > 0.0) || 3.0 * d >= self.r0 {
            return bad(format!("delta = {d}: 3*delta must stay below r0 = {}", self.r0));
        }
        if 5.0 * d >= self.r_out - self.r0 {
            return bad(format!("delta = {d}: 5*delta must stay below r_out - r0 = {}", self.r_out - self.r0));
        }
        if self.snapshots < 2 || self.eval_nt == 0 || self.eval_nr == 0 {
            return bad("need snapshots >= 2, eval_nt >= 1, eval_nr >= 1".into());
        }
        RhoGrid::new(self.rho_half_width, self.rho_nodes).map_err(|e| LabError::Usage(e.to_string()))?;
        Ok(())
    }

    /// Checks that the eps list supports an order fit.
    pub fn validate_for_fit(&self) -> LabResult<()> {
        self.validate()?;
        if self.eps.len() < 3 {
            return Err(LabError::Usage(format!("order fits need at least 3 eps values, got {}", self.eps.len())));
        }
        Ok(())
    }

    /// Radial scenario described by this config.
    pub fn scenario(&self) -> LabResult<RadialScenario> {
        let mut sc = RadialScenario::new(self.r0, self.r_out, self.t_end);
        sc.well = DoubleWell { beta: self.beta };
        sc.delta = self.delta();
        sc.outer_c2 = self.outer_c2;
        sc.rho_grid = RhoGrid::new(self.rho_half_width, self.rho_nodes).map_err(|e| LabError::Usage(e.to_string()))?;
        Ok(sc)
    }
}

/// Lower-case hex SHA-256.
pub fn digest_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}
