use clap::{Parser, Subcommand};
use sil_lab::commands::{self, GeometryArgs};
use sil_lab::config::parse_eps_list;
use sil_lab::{ExperimentConfig, LabError, LabResult, Outcome};
use std::path::PathBuf;
use std::process::ExitCode;

/// Approximate solutions, sharp and diffuse radial runs, and convergence
/// studies for the Stokes/Cahn–Hilliard system.
#[derive(Parser, Debug)]
#[command(name = "sil", version, about)]
struct Cli {
    /// Experiment config (flat key = value).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (or file for single-table commands).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Recompute even when the manifest says outputs are current.
    #[arg(long, global = true)]
    force: bool,
    /// Worker threads for per-eps parallelism (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Solve the optimal profile and write rho, value, derivative.
    Profile {
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long = "half-width")]
        half_width: Option<f64>,
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Check tubular-chart identities on random points.
    GeometryCheck {
        #[arg(long, default_value = "circle")]
        scenario: String,
        #[arg(long = "R")]
        radius: Option<f64>,
        #[arg(long = "Rout")]
        r_out: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Integrate the sharp-interface radius.
    Sharp {
        #[arg(long = "R0")]
        r0: Option<f64>,
        #[arg(long = "Rout")]
        r_out: Option<f64>,
        #[arg(long = "T")]
        t_end: Option<f64>,
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// Evaluate the approximate solution on a Cartesian grid.
    Approx {
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value = "radial")]
        scenario: String,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long, default_value_t = 128)]
        grid: usize,
    },
    /// Run the radial diffuse solver.
    Diffuse {
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long = "R0")]
        r0: Option<f64>,
        #[arg(long = "Rout")]
        r_out: Option<f64>,
        #[arg(long = "T")]
        t_end: Option<f64>,
        /// Radial intervals.
        #[arg(long)]
        nr: Option<usize>,
        #[arg(long)]
        snapshots: Option<usize>,
    },
    /// Residual norms and fitted orders over an eps list.
    Residuals {
        #[arg(long = "eps-list")]
        eps_list: Option<String>,
        #[arg(long, default_value = "radial")]
        scenario: String,
        #[arg(long = "T")]
        t_end: Option<f64>,
    },
    /// Full convergence study with threshold checks.
    Converge,
    /// Run the invariant suites.
    Invariants {
        /// Comma-separated suites.
        #[arg(long)]
        filter: Option<String>,
    },
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn execute(cli: Cli) -> LabResult<Outcome> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    set(&mut cfg.out, cli.out.clone());
    let (out, force, threads) = (cfg.out.clone(), cli.force, cli.threads);
    match cli.cmd {
        Cmd::Profile { beta, half_width, nodes } => commands::profile(
            beta.unwrap_or(cfg.beta),
            half_width.unwrap_or(cfg.rho_half_width),
            nodes.unwrap_or(cfg.rho_nodes),
            &out,
            force,
        ),
        Cmd::GeometryCheck { scenario, radius, r_out, delta, samples } => {
            let a = GeometryArgs {
                scenario,
                radius: radius.unwrap_or(cfg.r0),
                r_out: r_out.unwrap_or(cfg.r_out),
                delta: delta.unwrap_or_else(|| cfg.delta()),
                samples,
                seed: cfg.seed,
            };
            commands::geometry_check(&a, &out, force)
        }
        Cmd::Sharp { r0, r_out, t_end, samples } => {
            commands::sharp(cfg.beta, r0.unwrap_or(cfg.r0), r_out.unwrap_or(cfg.r_out), t_end.unwrap_or(cfg.t_end), samples, &out, force)
        }
        Cmd::Approx { eps, scenario, t, grid } => {
            cfg.scenario = scenario;
            cfg.validate()?;
            commands::approx(&cfg, eps.unwrap_or(cfg.eps[0]), t, grid, &out, force)
        }
        Cmd::Diffuse { eps, r0, r_out, t_end, nr, snapshots } => {
            set(&mut cfg.r0, r0);
            set(&mut cfg.r_out, r_out);
            set(&mut cfg.t_end, t_end);
            set(&mut cfg.snapshots, snapshots);
            if nr.is_some() {
                cfg.diffuse_intervals = nr;
            }
            let eps = eps.unwrap_or(cfg.eps[0]);
            cfg.eps = vec![eps];
            cfg.validate()?;
            commands::diffuse(&cfg, eps, &out, force)
        }
        Cmd::Residuals { eps_list, scenario, t_end } => {
            if let Some(l) = eps_list {
                cfg.eps = parse_eps_list(&l)?;
            }
            cfg.scenario = scenario;
            set(&mut cfg.t_end, t_end);
            commands::residuals(&cfg, threads, &out, force)
        }
        Cmd::Converge => commands::converge(&cfg, threads, &out, force),
        Cmd::Invariants { filter } => {
            let f: Option<Vec<String>> = filter.map(|s| s.split(',').map(|x| x.trim().to_string()).collect());
            commands::invariants(&cfg, f.as_deref(), &out, force)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(o) => {
            match o {
                Outcome::Ok => println!("ok"),
                Outcome::UpToDate => println!("outputs are current; nothing to do (use --force to recompute)"),
                Outcome::Failed => println!("one or more checks failed; see the output tables"),
            }
            o.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                LabError::Usage(_) => 2,
                _ => e.exit_code(),
            })
        }
    }
}
