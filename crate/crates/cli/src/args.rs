//! Command-line parsing and dispatch.

use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use eprb_core::ensemble::{Convention, PositionModel};

use crate::commands::{self, PairInputs};
use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "eprb",
    version,
    about = "Bohmian trajectories and spin correlations of the two-step EPR-B experiment"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConventionArg {
    Paper,
    Standard,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PositionModelArg {
    Independent,
    Shared,
}

/// Options shared by every command that builds a run configuration.
#[derive(Debug, Args)]
pub struct RunOpts {
    /// JSON file with optional `physical` and `ensemble` sections
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of pairs
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
    #[arg(long, value_enum)]
    pub position_model: Option<PositionModelArg>,
    /// Angles are given in radians instead of degrees
    #[arg(long)]
    pub radians: bool,
}

impl RunOpts {
    pub fn angle(&self, value: f64) -> f64 {
        if self.radians {
            value
        } else {
            value.to_radians()
        }
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(self.config.as_deref())?;
        let ec = &mut cfg.ensemble;
        if let Some(seed) = self.seed {
            ec.seed = seed;
        }
        if let Some(n) = self.n {
            ec.n_pairs = n;
        }
        if let Some(c) = self.convention {
            ec.convention = match c {
                ConventionArg::Paper => Convention::Paper,
                ConventionArg::Standard => Convention::Standard,
            };
        }
        if let Some(p) = self.position_model {
            ec.position_model = match p {
                PositionModelArg::Independent => PositionModel::Independent,
                PositionModelArg::Shared => PositionModel::Shared,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the derived constants Δt, z_Δ, u and t1
    Params {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write them as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trajectory of one pair through both measurement steps
    Pair {
        #[command(flatten)]
        run: RunOpts,
        /// Initial z of both atoms (m)
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        z0: f64,
        /// Initial x of both atoms (m)
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x0: f64,
        /// Polar angle of A's initial spin
        #[arg(long, allow_hyphen_values = true)]
        theta0: f64,
        /// Azimuth of A's initial spin
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phi0: f64,
        /// Rotation of the second magnet (defaults to the configured value)
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<f64>,
        #[arg(long, default_value = "pair.csv")]
        out: PathBuf,
    },
    /// Five sampled pairs in long format
    Figure2 {
        #[command(flatten)]
        run: RunOpts,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<f64>,
        #[arg(long, default_value = "figure2.csv")]
        out: PathBuf,
    },
    /// Monte Carlo statistics at one rotation angle
    Ensemble {
        #[command(flatten)]
        run: RunOpts,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<f64>,
        /// Output directory
        #[arg(long, default_value = "ensemble")]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Correlation E(δ) over a list of angles
    Sweep {
        #[command(flatten)]
        run: RunOpts,
        /// Comma-separated rotation angles
        #[arg(
            long,
            required = true,
            value_delimiter = ',',
            allow_hyphen_values = true
        )]
        delta: Vec<f64>,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Step-1 density on a (z_A, z_B) grid and both marginals
    Density {
        #[command(flatten)]
        run: RunOpts,
        /// Time after the magnet exit (s); defaults to the screen time t1
        #[arg(long)]
        t: Option<f64>,
        /// Output directory
        #[arg(long, default_value = "density")]
        out: PathBuf,
    },
}

fn with_delta(run: &RunOpts, delta: Option<f64>) -> Result<RunConfig> {
    let mut cfg = run.resolve()?;
    if let Some(d) = delta {
        cfg.ensemble.delta_rad = run.angle(d);
        cfg.validate()?;
    }
    Ok(cfg)
}

fn announce(path: &Path) {
    eprintln!("wrote {}", path.display());
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Params { config, out } => {
            let cfg = RunConfig::load(config.as_deref())?;
            let d = commands::cmd_params(&cfg, out.as_deref())?;
            print!("{}", commands::format_params(&d));
        }
        Command::Pair {
            run,
            z0,
            x0,
            theta0,
            phi0,
            delta,
            out,
        } => {
            let cfg = with_delta(&run, delta)?;
            let inputs = PairInputs {
                z0_m: z0,
                x0_m: x0,
                theta0_rad: run.angle(theta0),
                phi0_rad: run.angle(phi0),
                delta_rad: cfg.ensemble.delta_rad,
            };
            let p = commands::cmd_pair(&cfg, inputs, &out)?;
            announce(&out);
            println!("outcome_A {} outcome_B {}", p.outcome_a, p.outcome_b());
        }
        Command::Figure2 { run, delta, out } => {
            let cfg = with_delta(&run, delta)?;
            commands::cmd_figure2(&cfg, &out)?;
            announce(&out);
        }
        Command::Ensemble {
            run,
            delta,
            out,
            workers,
        } => {
            let cfg = with_delta(&run, delta)?;
            let stats = commands::cmd_ensemble(&cfg, &out, workers)?;
            announce(&out);
            println!("E {} ± {}", stats.correlation, stats.correlation_stderr);
        }
        Command::Sweep {
            run,
            delta,
            out,
            workers,
        } => {
            let cfg = run.resolve()?;
            let deltas: Vec<f64> = delta.iter().map(|&d| run.angle(d)).collect();
            let rows = commands::cmd_sweep(&cfg, &deltas, &out, workers)?;
            announce(&out);
            for r in rows {
                println!("{} {} {}", r.delta_rad, r.correlation, r.stderr);
            }
        }
        Command::Density { run, t, out } => {
            let cfg = run.resolve()?;
            let t = t.unwrap_or(cfg.experiment()?.derived.drift_time_s);
            let norm = commands::cmd_density(&cfg, t, &out)?;
            announce(&out);
            println!(
                "normalization {} {} {}",
                norm.joint, norm.marginal_a, norm.marginal_b
            );
        }
    }
    Ok(())
}
