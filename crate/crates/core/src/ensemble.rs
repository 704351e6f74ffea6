//! Monte Carlo over hidden variables: sampling, batch execution, statistics.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::density_marginal_a;
use crate::error::{Error, Result};
use crate::experiment::Experiment;
use crate::histogram::{tv_distance, Histogram};
use crate::rng::{derive_seed, pair_stream};
use crate::spin::{Sign, SpinOrientation};
use crate::trajectory::{pair_outcome, PairInitialConditions, PairOutcome, StepCounts};

/// Labeling of B's outcome. `Paper` gives E(δ) = cos δ; `Standard` flips
/// B's label and gives the textbook singlet curve E(δ) = −cos δ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Paper,
    Standard,
}

/// Where B starts its second measurement.
///
/// `Independent` draws B's (x0, z0) from its own packet, as the product form
/// of the initial two-body density prescribes. `Shared` gives B exactly A's
/// initial position. Under `Shared`, conditioning on A's outcome biases B's
/// position and the correlation curve departs from cos δ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PositionModel {
    #[default]
    Independent,
    Shared,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n_pairs: usize,
    pub seed: u64,
    pub delta_rad: f64,
    pub convention: Convention,
    pub position_model: PositionModel,
    pub steps_in: usize,
    pub steps_out: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        let steps = StepCounts::default();
        Self {
            n_pairs: 10_000,
            seed: 1,
            delta_rad: 0.0,
            convention: Convention::Paper,
            position_model: PositionModel::Independent,
            steps_in: steps.in_magnet,
            steps_out: steps.post_magnet,
        }
    }
}

impl EnsembleConfig {
    pub fn steps(&self) -> StepCounts {
        StepCounts {
            in_magnet: self.steps_in,
            post_magnet: self.steps_out,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pairs == 0 {
            return Err(Error::InvalidParameter {
                field: "n_pairs",
                reason: "must be >= 1".into(),
            });
        }
        if !self.delta_rad.is_finite() {
            return Err(Error::InvalidParameter {
                field: "delta_rad",
                reason: "must be finite".into(),
            });
        }
        self.steps().validate()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    #[serde(rename = "++")]
    pub plus_plus: u64,
    #[serde(rename = "+-")]
    pub plus_minus: u64,
    #[serde(rename = "-+")]
    pub minus_plus: u64,
    #[serde(rename = "--")]
    pub minus_minus: u64,
}

impl OutcomeCounts {
    pub fn record(&mut self, a: Sign, b: Sign) {
        match (a, b) {
            (Sign::Plus, Sign::Plus) => self.plus_plus += 1,
            (Sign::Plus, Sign::Minus) => self.plus_minus += 1,
            (Sign::Minus, Sign::Plus) => self.minus_plus += 1,
            (Sign::Minus, Sign::Minus) => self.minus_minus += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.plus_plus + self.plus_minus + self.minus_plus + self.minus_minus
    }

    pub fn same(&self) -> u64 {
        self.plus_plus + self.minus_minus
    }

    pub fn different(&self) -> u64 {
        self.plus_minus + self.minus_plus
    }

    /// (N_same − N_diff) / N
    pub fn correlation(&self) -> f64 {
        (self.same() as f64 - self.different() as f64) / self.total() as f64
    }

    /// Standard error of the correlation, treating each pair's product of
    /// outcomes as an independent ±1 draw.
    pub fn correlation_stderr(&self) -> f64 {
        let e = self.correlation();
        ((1.0 - e * e).max(0.0) / self.total() as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub n_pairs: usize,
    pub seed: u64,
    pub delta_rad: f64,
    pub convention: Convention,
    pub position_model: PositionModel,
    pub counts: OutcomeCounts,
    #[serde(rename = "E")]
    pub correlation: f64,
    #[serde(rename = "E_stderr")]
    pub correlation_stderr: f64,
    pub fraction_a_plus: f64,
    /// Mean impact point of A over pairs with A = +; `None` if there are none.
    pub mean_z_plus_m: Option<f64>,
    pub mean_z_minus_m: Option<f64>,
    pub tv_distance_a: f64,
    #[serde(skip)]
    pub histogram_z_a: Histogram,
}

impl EnsembleStats {
    /// Observed distance between the two spots of A.
    pub fn spot_separation(&self) -> Option<f64> {
        Some(self.mean_z_plus_m? - self.mean_z_minus_m?)
    }
}

/// Hidden variables of pair `index` of a run seeded with `seed`.
///
/// Positions are normal with standard deviation σ0 (the z and x marginals of
/// |f|²); A's spin is uniform on the sphere. B's own position draws are
/// always consumed, so A's variables do not depend on the position model.
pub fn sample_pair(
    seed: u64,
    index: u64,
    exp: &Experiment,
    model: PositionModel,
) -> PairInitialConditions {
    let mut rng = pair_stream(seed, index);
    let s = exp.sigma0();
    let z0 = s * rng.sample::<f64, _>(StandardNormal);
    let x0 = s * rng.sample::<f64, _>(StandardNormal);
    let v: f64 = rng.random();
    let theta0 = (1.0 - 2.0 * v).acos();
    let phi0 = -PI + TAU * rng.random::<f64>();
    let z_b = s * rng.sample::<f64, _>(StandardNormal);
    let x_b = s * rng.sample::<f64, _>(StandardNormal);
    let orient = SpinOrientation::new(theta0, phi0);
    match model {
        PositionModel::Shared => PairInitialConditions::shared(z0, x0, orient),
        PositionModel::Independent => PairInitialConditions {
            z0_m: z0,
            x0_m: x0,
            orient_a0: orient,
            z0_b_m: z_b,
            x0_b_m: x_b,
        },
    }
}

pub fn sample_initials(
    n: usize,
    seed: u64,
    exp: &Experiment,
    model: PositionModel,
) -> Vec<PairInitialConditions> {
    (0..n as u64)
        .map(|i| sample_pair(seed, i, exp, model))
        .collect()
}

fn with_workers<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Pool(e.to_string()))?;
            Ok(pool.install(job))
        }
    }
}

fn run_pairs(ec: &EnsembleConfig, exp: &Experiment) -> Result<Vec<PairOutcome>> {
    let steps = ec.steps();
    (0..ec.n_pairs)
        .into_par_iter()
        .map(|i| {
            let init = sample_pair(ec.seed, i as u64, exp, ec.position_model);
            pair_outcome(&init, ec.delta_rad, exp, steps).map_err(|e| Error::Pair {
                index: i,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Reduces per-pair outcomes in index order, so the result does not depend
/// on how the pairs were scheduled.
fn aggregate(
    ec: &EnsembleConfig,
    exp: &Experiment,
    outcomes: &[PairOutcome],
) -> Result<EnsembleStats> {
    let half = exp.screen_half_width();
    let mut hist = Histogram::new(-half, half, exp.sigma0() / 5.0);
    let mut counts = OutcomeCounts::default();
    let (mut sum_plus, mut sum_minus) = (0.0, 0.0);
    for o in outcomes {
        let b = match ec.convention {
            Convention::Paper => o.outcome_b,
            Convention::Standard => o.outcome_b.flip(),
        };
        counts.record(o.outcome_a, b);
        match o.outcome_a {
            Sign::Plus => sum_plus += o.z_a_final_m,
            Sign::Minus => sum_minus += o.z_a_final_m,
        }
        hist.add(o.z_a_final_m);
    }
    let n_plus = counts.plus_plus + counts.plus_minus;
    let n_minus = counts.minus_plus + counts.minus_minus;
    let mean = |sum: f64, n: u64| (n > 0).then(|| sum / n as f64);
    let t1 = exp.derived.drift_time_s;
    let tv = tv_distance(&hist, |z| density_marginal_a(z, t1, exp))?;
    Ok(EnsembleStats {
        n_pairs: ec.n_pairs,
        seed: ec.seed,
        delta_rad: ec.delta_rad,
        convention: ec.convention,
        position_model: ec.position_model,
        correlation: counts.correlation(),
        correlation_stderr: counts.correlation_stderr(),
        fraction_a_plus: n_plus as f64 / ec.n_pairs as f64,
        mean_z_plus_m: mean(sum_plus, n_plus),
        mean_z_minus_m: mean(sum_minus, n_minus),
        counts,
        tv_distance_a: tv,
        histogram_z_a: hist,
    })
}

/// Runs the two-step protocol for every sampled pair on the current rayon
/// pool.
pub fn run_ensemble(ec: &EnsembleConfig, exp: &Experiment) -> Result<EnsembleStats> {
    run_ensemble_with_workers(ec, exp, None)
}

/// As [`run_ensemble`], on a dedicated pool of `workers` threads when given.
pub fn run_ensemble_with_workers(
    ec: &EnsembleConfig,
    exp: &Experiment,
    workers: Option<usize>,
) -> Result<EnsembleStats> {
    ec.validate()?;
    let outcomes = with_workers(workers, || run_pairs(ec, exp))??;
    aggregate(ec, exp, &outcomes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta_rad: f64,
    #[serde(rename = "E")]
    pub correlation: f64,
    pub stderr: f64,
    pub n: usize,
}

/// Seed of row `k` in a sweep with master seed `master`.
pub fn sweep_seed(master: u64, k: usize) -> u64 {
    derive_seed(master, k as u64)
}

/// One ensemble per angle; row k is seeded with `sweep_seed(template.seed, k)`.
pub fn correlation_sweep(
    deltas: &[f64],
    template: &EnsembleConfig,
    exp: &Experiment,
    workers: Option<usize>,
) -> Result<Vec<SweepRow>> {
    if deltas.is_empty() {
        return Err(Error::EmptySweep);
    }
    deltas
        .iter()
        .enumerate()
        .map(|(k, &delta)| {
            let ec = EnsembleConfig {
                delta_rad: delta,
                seed: sweep_seed(template.seed, k),
                ..*template
            };
            let stats = run_ensemble_with_workers(&ec, exp, workers)?;
            Ok(SweepRow {
                delta_rad: delta,
                correlation: stats.correlation,
                stderr: stats.correlation_stderr,
                n: stats.n_pairs,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::wrap_angle;
    use std::f64::consts::FRAC_PI_2;

    fn small(n: usize, delta: f64) -> EnsembleConfig {
        EnsembleConfig {
            n_pairs: n,
            delta_rad: delta,
            steps_in: 200,
            steps_out: 400,
            ..Default::default()
        }
    }

    #[test]
    fn sampler_moments() {
        let e = Experiment::default();
        let n = 100_000;
        let s = sample_initials(n, 9, &e, PositionModel::Independent);
        let mean_z = s.iter().map(|p| p.z0_m).sum::<f64>() / n as f64;
        assert!(mean_z.abs() < 3.0 * e.sigma0() / (n as f64).sqrt());
        let mean_cos = s.iter().map(|p| p.orient_a0.theta().cos()).sum::<f64>() / n as f64;
        assert!(mean_cos.abs() < 0.01);
        let var_cos = s
            .iter()
            .map(|p| p.orient_a0.theta().cos().powi(2))
            .sum::<f64>()
            / n as f64;
        assert!((var_cos - 1.0 / 3.0).abs() < 0.01);
        let var_zb = s.iter().map(|p| p.z0_b_m.powi(2)).sum::<f64>() / n as f64;
        assert!((var_zb / e.sigma0().powi(2) - 1.0).abs() < 0.02);
    }

    #[test]
    fn sampler_is_deterministic_and_index_addressable() {
        let e = Experiment::default();
        let a = sample_initials(50, 3, &e, PositionModel::Independent);
        let b = sample_initials(50, 3, &e, PositionModel::Independent);
        assert_eq!(a, b);
        assert_eq!(sample_pair(3, 17, &e, PositionModel::Independent), a[17]);
        assert_ne!(sample_initials(50, 4, &e, PositionModel::Independent), a);
    }

    #[test]
    fn shared_model_copies_a_and_keeps_a_unchanged() {
        let e = Experiment::default();
        let ind = sample_initials(20, 5, &e, PositionModel::Independent);
        let sh = sample_initials(20, 5, &e, PositionModel::Shared);
        for (i, s) in ind.iter().zip(&sh) {
            assert_eq!((i.z0_m, i.x0_m, i.orient_a0), (s.z0_m, s.x0_m, s.orient_a0));
            assert_eq!((s.z0_b_m, s.x0_b_m), (s.z0_m, s.x0_m));
        }
    }

    #[test]
    fn b_starts_antiparallel() {
        let e = Experiment::default();
        for p in sample_initials(200, 6, &e, PositionModel::Independent) {
            let b = p.orient_b0();
            assert_eq!(b.theta(), PI - p.orient_a0.theta());
            assert_eq!(b.phi(), wrap_angle(p.orient_a0.phi() - PI));
        }
    }

    #[test]
    fn counts_and_correlation() {
        let mut c = OutcomeCounts::default();
        for (a, b) in [
            (Sign::Plus, Sign::Plus),
            (Sign::Minus, Sign::Minus),
            (Sign::Plus, Sign::Minus),
            (Sign::Plus, Sign::Plus),
        ] {
            c.record(a, b);
        }
        assert_eq!(c.total(), 4);
        assert_eq!(c.correlation(), 0.5);
        assert!((c.correlation_stderr() - (0.75f64 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn aligned_magnets_fully_correlated() {
        let e = Experiment::default();
        let paper = run_ensemble(&small(2000, 0.0), &e).unwrap();
        assert!(paper.correlation >= 0.99);
        assert_eq!(paper.counts.total(), 2000);
        let std = run_ensemble(
            &EnsembleConfig {
                convention: Convention::Standard,
                ..small(2000, 0.0)
            },
            &e,
        )
        .unwrap();
        assert_eq!(std.correlation, -paper.correlation);
        assert_eq!(std.counts.plus_minus, paper.counts.plus_plus);
        assert_eq!(std.histogram_z_a, paper.histogram_z_a);
    }

    #[test]
    fn orthogonal_magnets_uncorrelated() {
        let e = Experiment::default();
        let st = run_ensemble(&small(4000, FRAC_PI_2), &e).unwrap();
        assert!(st.correlation.abs() < 4.0 / (4000f64).sqrt());
        let n = st.n_pairs as f64;
        assert!((st.fraction_a_plus - 0.5).abs() <= 1.5 / n.sqrt());
    }

    #[test]
    fn worker_count_does_not_change_stats() {
        let e = Experiment::default();
        let ec = small(500, 0.9);
        let one = run_ensemble_with_workers(&ec, &e, Some(1)).unwrap();
        let four = run_ensemble_with_workers(&ec, &e, Some(4)).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn invalid_configs_rejected() {
        let e = Experiment::default();
        assert!(run_ensemble(&small(0, 0.0), &e).is_err());
        let few = EnsembleConfig {
            steps_in: 10,
            ..small(10, 0.0)
        };
        assert!(matches!(
            run_ensemble(&few, &e),
            Err(Error::TooFewSteps { .. })
        ));
        assert_eq!(
            correlation_sweep(&[], &small(10, 0.0), &e, None),
            Err(Error::EmptySweep)
        );
    }

    #[test]
    fn sweep_rows_match_single_runs() {
        let e = Experiment::default();
        let template = small(300, 0.0);
        let rows = correlation_sweep(&[0.0, 1.0, PI], &template, &e, None).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1].delta_rad, 1.0);
        let single = run_ensemble(
            &EnsembleConfig {
                delta_rad: 1.0,
                seed: sweep_seed(template.seed, 1),
                ..template
            },
            &e,
        )
        .unwrap();
        assert_eq!(rows[1].correlation, single.correlation);
        assert!(rows[0].correlation > 0.98 && rows[2].correlation < -0.98);
        assert_eq!(
            rows,
            correlation_sweep(&[0.0, 1.0, PI], &template, &e, None).unwrap()
        );
    }
}
