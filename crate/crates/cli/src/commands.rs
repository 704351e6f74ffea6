//! The subcommands as library functions. Each writes its data files and a
//! manifest, and returns what it computed.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use eprb_core::analytic::{density_marginal_a, density_marginal_b, density_step1};
use eprb_core::ensemble::{
    correlation_sweep, run_ensemble_with_workers, sample_pair, EnsembleStats, PositionModel,
    SweepRow,
};
use eprb_core::histogram::Histogram;
use eprb_core::trajectory::{simulate_pair, PairInitialConditions, PairTrajectory};
use eprb_core::{DerivedParams, Experiment, SpinOrientation};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::manifest::{manifest_path_for, ManifestBuilder};
use crate::table::{num, CsvWriter};

pub const FIGURE2_PAIRS: usize = 5;

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

pub fn format_params(d: &DerivedParams) -> String {
    format!(
        "transit_time_s {}\nz_delta_m {}\nu_m_per_s {}\ndrift_time_s {}\n",
        num(d.transit_time_s),
        num(d.z_delta_m),
        num(d.u_m_per_s),
        num(d.drift_time_s)
    )
}

/// Derived constants; also written as JSON when `out` is given.
pub fn cmd_params(cfg: &RunConfig, out: Option<&Path>) -> Result<DerivedParams> {
    let d = cfg.experiment()?.derived;
    if let Some(out) = out {
        ensure_parent(out)?;
        let mut m = ManifestBuilder::start("params", *cfg, cfg.ensemble.seed);
        fs::write(out, serde_json::to_string_pretty(&d)? + "\n")?;
        m.output(out);
        m.write(&manifest_path_for(out))?;
    }
    Ok(d)
}

/// Hidden variables of a single pair given on the command line. B shares
/// A's starting point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairInputs {
    pub z0_m: f64,
    pub x0_m: f64,
    pub theta0_rad: f64,
    pub phi0_rad: f64,
    pub delta_rad: f64,
}

const PAIR_HEADER: [&str; 7] = [
    "t_s",
    "y_A_m",
    "z_A_m",
    "theta_A_rad",
    "z_B_m",
    "theta_B_rad",
    "phase",
];

fn pair_rows(p: &PairTrajectory, exp: &Experiment) -> Vec<[String; 7]> {
    let vy = exp.cfg.v_y_m_per_s;
    let mut rows: Vec<[String; 7]> = p
        .samples_a
        .iter()
        .zip(&p.samples_b_step1)
        .map(|(a, b)| {
            [
                num(a.t_s),
                num(0.0 - vy * a.t_s),
                num(a.z_m),
                num(a.theta_rad),
                num(b.z_m),
                num(b.theta_rad),
                a.stage.label().to_string(),
            ]
        })
        .collect();
    let t0 = exp.detection_time();
    rows.extend(p.step2.samples.iter().map(|s| {
        [
            num(t0 + s.t_s),
            String::new(),
            String::new(),
            String::new(),
            num(s.z_m),
            num(s.theta_rad),
            format!("step2_{}", s.stage.label()),
        ]
    }));
    rows
}

fn outcome_note(p: &PairTrajectory) -> String {
    format!(
        "outcome_A={} outcome_B={} delta_rad={}",
        p.outcome_a,
        p.outcome_b(),
        num(p.delta_rad)
    )
}

const STEP2_NOTE: &str = "step2 rows: t_s counts from A's entry, z_B_m and theta_B_rad are in the frame of the rotated magnet";

/// One pair through both steps, as CSV.
pub fn cmd_pair(cfg: &RunConfig, inputs: PairInputs, out: &Path) -> Result<PairTrajectory> {
    let exp = cfg.experiment()?;
    let init = PairInitialConditions::shared(
        inputs.z0_m,
        inputs.x0_m,
        SpinOrientation::new(inputs.theta0_rad, inputs.phi0_rad),
    );
    let p = simulate_pair(&init, inputs.delta_rad, &exp, cfg.ensemble.steps())?;

    ensure_parent(out)?;
    let mut m = ManifestBuilder::start("pair", *cfg, cfg.ensemble.seed).inputs(json!(inputs));
    let mut w = CsvWriter::create(out, &PAIR_HEADER)?;
    for r in pair_rows(&p, &exp) {
        w.row(&r)?;
    }
    w.comment(&outcome_note(&p))?;
    w.comment(STEP2_NOTE)?;
    w.finish()?;
    m.output(out);
    m.results(json!({
        "outcome_A": p.outcome_a,
        "outcome_B": p.outcome_b(),
        "z_A_final_m": p.samples_a.last().map(|s| s.z_m),
        "step2_start_primed": p.step2.start,
        "step2_orientation": p.step2.orientation,
    }));
    m.write(&manifest_path_for(out))?;
    Ok(p)
}

/// Five pairs drawn by the ensemble sampler with B starting where A does,
/// in long format.
pub fn cmd_figure2(cfg: &RunConfig, out: &Path) -> Result<Vec<PairTrajectory>> {
    let exp = cfg.experiment()?;
    let ec = cfg.ensemble;
    let pairs = (0..FIGURE2_PAIRS as u64)
        .map(|i| {
            let init = sample_pair(ec.seed, i, &exp, PositionModel::Shared);
            simulate_pair(&init, ec.delta_rad, &exp, ec.steps())
        })
        .collect::<eprb_core::Result<Vec<_>>>()?;

    ensure_parent(out)?;
    let mut m = ManifestBuilder::start("figure2", *cfg, ec.seed)
        .inputs(json!({ "position_model": PositionModel::Shared }));
    let mut header = vec!["pair_id"];
    header.extend(PAIR_HEADER);
    let mut w = CsvWriter::create(out, &header)?;
    for (id, p) in pairs.iter().enumerate() {
        for r in pair_rows(p, &exp) {
            let mut row = vec![id.to_string()];
            row.extend(r);
            w.row(&row)?;
        }
    }
    for (id, p) in pairs.iter().enumerate() {
        w.comment(&format!("pair_id={id} {}", outcome_note(p)))?;
    }
    w.comment(STEP2_NOTE)?;
    w.finish()?;
    m.output(out);
    m.results(json!(pairs
        .iter()
        .map(|p| json!({ "initial": p.initial, "outcome_A": p.outcome_a, "outcome_B": p.outcome_b() }))
        .collect::<Vec<_>>()));
    m.write(&manifest_path_for(out))?;
    Ok(pairs)
}

pub const STATS_FILE: &str = "stats.json";
pub const HISTOGRAM_FILE: &str = "histogram_z_a.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Stats JSON exactly as written by [`cmd_ensemble`]. Contains nothing that
/// depends on the worker count or the clock.
pub fn stats_json(stats: &EnsembleStats) -> Result<String> {
    Ok(serde_json::to_string_pretty(stats)? + "\n")
}

fn write_histogram(path: &Path, hist: &Histogram, exp: &Experiment) -> Result<f64> {
    let t1 = exp.derived.drift_time_s;
    let masses = hist.analytic_masses(|z| density_marginal_a(z, t1, exp));
    let mut w = CsvWriter::create(
        path,
        &["bin_left_m", "bin_right_m", "count", "analytic_mass"],
    )?;
    for (i, (&count, &mass)) in hist.counts.iter().zip(&masses).enumerate() {
        w.row(&[
            num(hist.edge(i)),
            num(hist.edge(i + 1)),
            count.to_string(),
            num(mass),
        ])?;
    }
    w.comment(&format!(
        "underflow={} overflow={} t_s={}",
        hist.underflow,
        hist.overflow,
        num(t1)
    ))?;
    w.finish()?;
    Ok(masses.iter().sum())
}

pub fn cmd_ensemble(
    cfg: &RunConfig,
    out_dir: &Path,
    workers: Option<usize>,
) -> Result<EnsembleStats> {
    let exp = cfg.experiment()?;
    let mut m = ManifestBuilder::start("ensemble", *cfg, cfg.ensemble.seed);
    let stats = run_ensemble_with_workers(&cfg.ensemble, &exp, workers)?;

    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let stats_path = out_dir.join(STATS_FILE);
    fs::write(&stats_path, stats_json(&stats)?)?;
    m.output(&stats_path);
    let hist_path = out_dir.join(HISTOGRAM_FILE);
    let mass = write_histogram(&hist_path, &stats.histogram_z_a, &exp)?;
    m.output(&hist_path);
    m.results(json!({
        "E": stats.correlation,
        "E_stderr": stats.correlation_stderr,
        "spot_separation_m": stats.spot_separation(),
        "tv_distance_a": stats.tv_distance_a,
        "histogram_analytic_mass": mass,
    }));
    m.write(&out_dir.join(MANIFEST_FILE))?;
    Ok(stats)
}

pub fn cmd_sweep(
    cfg: &RunConfig,
    deltas_rad: &[f64],
    out: &Path,
    workers: Option<usize>,
) -> Result<Vec<SweepRow>> {
    if deltas_rad.is_empty() {
        bail!("at least one rotation angle is required");
    }
    let exp = cfg.experiment()?;
    let mut m = ManifestBuilder::start("sweep", *cfg, cfg.ensemble.seed)
        .inputs(json!({ "deltas_rad": deltas_rad }));
    let rows = correlation_sweep(deltas_rad, &cfg.ensemble, &exp, workers)?;

    ensure_parent(out)?;
    let mut w = CsvWriter::create(out, &["delta_rad", "E", "stderr", "n"])?;
    for r in &rows {
        w.row(&[
            num(r.delta_rad),
            num(r.correlation),
            num(r.stderr),
            r.n.to_string(),
        ])?;
    }
    w.comment(
        &format!(
            "convention={:?} master_seed={}",
            cfg.ensemble.convention, cfg.ensemble.seed
        )
        .to_lowercase(),
    )?;
    w.finish()?;
    m.output(out);
    m.results(json!({ "rows": rows }));
    m.write(&manifest_path_for(out))?;
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityNormalization {
    pub joint: f64,
    pub marginal_a: f64,
    pub marginal_b: f64,
}

pub const DENSITY_FILE: &str = "density.csv";
pub const MARGINAL_A_FILE: &str = "marginal_a.csv";
pub const MARGINAL_B_FILE: &str = "marginal_b.csv";

/// Grid nodes: the histogram bin edges, widened when the spots at `t` lie
/// beyond the detection window.
pub fn density_nodes(exp: &Experiment, t: f64) -> Vec<f64> {
    let half = exp
        .screen_half_width()
        .max(exp.derived.branch_offset(t).abs() + 6.0 * exp.sigma0());
    let hist = Histogram::new(-half, half, exp.sigma0() / 5.0);
    (0..=hist.bins()).map(|i| hist.edge(i)).collect()
}

fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { nodes[i] - nodes[i - 1] } else { 0.0 };
            let right = if i + 1 < n {
                nodes[i + 1] - nodes[i]
            } else {
                0.0
            };
            0.5 * (left + right)
        })
        .collect()
}

pub fn cmd_density(cfg: &RunConfig, t: f64, out_dir: &Path) -> Result<DensityNormalization> {
    if !(t.is_finite() && t >= 0.0) {
        bail!("time must be finite and >= 0, got {t}");
    }
    let exp = cfg.experiment()?;
    let mut m =
        ManifestBuilder::start("density", *cfg, cfg.ensemble.seed).inputs(json!({ "t_s": t }));
    let nodes = density_nodes(&exp, t);
    let w = trapezoid_weights(&nodes);
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;

    let joint_path = out_dir.join(DENSITY_FILE);
    let mut joint = 0.0;
    let mut csv = CsvWriter::create(&joint_path, &["z_A_m", "z_B_m", "rho_per_m2"])?;
    for (za, wa) in nodes.iter().zip(&w) {
        for (zb, wb) in nodes.iter().zip(&w) {
            let rho = density_step1(*za, *zb, t, &exp);
            joint += wa * wb * rho;
            csv.row(&[num(*za), num(*zb), num(rho)])?;
        }
    }
    csv.comment(&format!("t_s={}", num(t)))?;
    csv.finish()?;

    let marginal =
        |file: &str, col: &str, rho_col: &str, f: &dyn Fn(f64) -> f64| -> Result<(PathBuf, f64)> {
            let path = out_dir.join(file);
            let mut csv = CsvWriter::create(&path, &[col, rho_col])?;
            let mut norm = 0.0;
            for (z, wz) in nodes.iter().zip(&w) {
                let rho = f(*z);
                norm += wz * rho;
                csv.row(&[num(*z), num(rho)])?;
            }
            csv.comment(&format!("t_s={}", num(t)))?;
            csv.finish()?;
            Ok((path, norm))
        };
    let (a_path, norm_a) = marginal(MARGINAL_A_FILE, "z_A_m", "rho_A_per_m", &|z| {
        density_marginal_a(z, t, &exp)
    })?;
    let (b_path, norm_b) = marginal(MARGINAL_B_FILE, "z_B_m", "rho_B_per_m", &|z| {
        density_marginal_b(z, &exp)
    })?;

    let norm = DensityNormalization {
        joint,
        marginal_a: norm_a,
        marginal_b: norm_b,
    };
    for p in [&joint_path, &a_path, &b_path] {
        m.output(p);
    }
    m.results(json!({ "normalization": norm, "grid_points_per_axis": nodes.len() }));
    m.write(&out_dir.join(MANIFEST_FILE))?;
    Ok(norm)
}
