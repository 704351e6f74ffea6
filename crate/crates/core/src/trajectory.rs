//! Bohmian trajectories of the pair through both measurement steps.
//!
//! Particle A moves along z under the velocity field of its effective wave
//! function while its spin angle θ follows algebraically from (z, t):
//!
//! ```text
//! tan(θ/2) = tan(θ0/2) · exp(−ζ(z, t))
//! ζ = μ B'0 t² z / (2 m σ0²)     inside the magnet
//! ζ = (z_Δ + u t) z / σ0²        after the exit (t re-zeroed there)
//! ```
//!
//! Writing κ = −ln tan(θ0/2), this is cos θ = tanh(ζ + κ), and the velocity
//! is (μ B'0 t / m) cos θ inside the magnet and u cos θ after it. The two
//! exponents agree at the seam because μ B'0 Δt² / 2m = z_Δ.
//!
//! B does not move in z during the first step; its spin mirrors A's. In the
//! second step B crosses a magnet rotated by δ about y and is integrated
//! with the same machinery in the primed frame.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analytic::{conditional_b_after_a, PlanePoint};
use crate::error::{Error, Result};
use crate::experiment::Experiment;
use crate::ode;
use crate::spin::{
    orientation_from_spinor, rotate_basis_reflecting, wrap_angle, Sign, SpinOrientation,
};

pub const MIN_STEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    InMagnet,
    PostMagnet,
}

impl Stage {
    pub fn label(self) -> &'static str {
        match self {
            Stage::InMagnet => "in_magnet",
            Stage::PostMagnet => "post_magnet",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    /// Time since the particle entered its magnet.
    pub t_s: f64,
    pub z_m: f64,
    pub theta_rad: f64,
    pub phi_rad: f64,
    pub stage: Stage,
}

/// Hidden variables of one pair.
///
/// A's spin is stored; B's initial spin is always the opposite one. B's
/// transverse position is stored separately so that it may either equal
/// A's or be drawn on its own (see `PositionModel` in the ensemble module).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairInitialConditions {
    pub z0_m: f64,
    pub x0_m: f64,
    pub orient_a0: SpinOrientation,
    pub z0_b_m: f64,
    pub x0_b_m: f64,
}

impl PairInitialConditions {
    /// Both atoms start from the same transverse point.
    pub fn shared(z0_m: f64, x0_m: f64, orient_a0: SpinOrientation) -> Self {
        Self {
            z0_m,
            x0_m,
            orient_a0,
            z0_b_m: z0_m,
            x0_b_m: x0_m,
        }
    }

    pub fn orient_b0(&self) -> SpinOrientation {
        self.orient_a0.opposite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCounts {
    pub in_magnet: usize,
    pub post_magnet: usize,
}

impl Default for StepCounts {
    fn default() -> Self {
        Self {
            in_magnet: 2000,
            post_magnet: 4000,
        }
    }
}

impl StepCounts {
    pub fn new(in_magnet: usize, post_magnet: usize) -> Result<Self> {
        let s = Self {
            in_magnet,
            post_magnet,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (phase, got) in [
            ("in-magnet", self.in_magnet),
            ("post-magnet", self.post_magnet),
        ] {
            if got < MIN_STEPS {
                return Err(Error::TooFewSteps {
                    phase,
                    got,
                    min: MIN_STEPS,
                });
            }
        }
        Ok(())
    }

    pub fn halve_step(&self) -> Self {
        Self {
            in_magnet: 2 * self.in_magnet,
            post_magnet: 2 * self.post_magnet,
        }
    }
}

/// Step-2 record of B, in the frame of the rotated magnet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step2Record {
    /// B's (x', z') when it enters the second magnet.
    pub start: PlanePoint,
    /// B's spin in the primed basis, conditioned on A's outcome.
    pub orientation: SpinOrientation,
    pub samples: Vec<TrajectorySample>,
    pub outcome: Sign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTrajectory {
    pub initial: PairInitialConditions,
    pub delta_rad: f64,
    pub samples_a: Vec<TrajectorySample>,
    pub samples_b_step1: Vec<TrajectorySample>,
    pub step2: Step2Record,
    pub outcome_a: Sign,
}

impl PairTrajectory {
    pub fn outcome_b(&self) -> Sign {
        self.step2.outcome
    }
}

/// The θ law as a function of its exponent ζ, with the poles kept exact.
#[derive(Debug, Clone, Copy, PartialEq)]
enum SpinLaw {
    North,
    South,
    Tilted { kappa: f64 },
}

impl SpinLaw {
    fn new(theta0: f64) -> Self {
        if theta0 <= 0.0 {
            SpinLaw::North
        } else if theta0 >= PI {
            SpinLaw::South
        } else {
            SpinLaw::Tilted {
                kappa: -(theta0 / 2.0).tan().ln(),
            }
        }
    }

    #[inline]
    fn cos_theta(self, zeta: f64) -> f64 {
        match self {
            SpinLaw::North => 1.0,
            SpinLaw::South => -1.0,
            SpinLaw::Tilted { kappa } => (zeta + kappa).tanh(),
        }
    }

    fn theta(self, zeta: f64) -> f64 {
        match self {
            SpinLaw::North => 0.0,
            SpinLaw::South => PI,
            SpinLaw::Tilted { kappa } => 2.0 * (-(zeta + kappa)).exp().atan(),
        }
    }
}

#[inline]
fn magnet_exponent(z: f64, t: f64, exp: &Experiment) -> f64 {
    let s = exp.sigma0();
    exp.cfg.acceleration() * t * t * z / (2.0 * s * s)
}

#[inline]
fn drift_exponent(z: f64, t: f64, exp: &Experiment) -> f64 {
    let s = exp.sigma0();
    exp.derived.branch_offset(t) * z / (s * s)
}

/// Spin angle inside the magnet, `t` ∈ [0, Δt] after entry.
pub fn theta_in_magnet(z: f64, t: f64, theta0: f64, exp: &Experiment) -> f64 {
    SpinLaw::new(theta0).theta(magnet_exponent(z, t, exp))
}

pub fn velocity_in_magnet(z: f64, t: f64, theta0: f64, exp: &Experiment) -> f64 {
    exp.cfg.acceleration() * t * SpinLaw::new(theta0).cos_theta(magnet_exponent(z, t, exp))
}

/// Spin angle `t` ≥ 0 after the magnet exit.
pub fn theta_after_magnet(z: f64, t: f64, theta0: f64, exp: &Experiment) -> f64 {
    SpinLaw::new(theta0).theta(drift_exponent(z, t, exp))
}

pub fn velocity_after_magnet(z: f64, t: f64, theta0: f64, exp: &Experiment) -> f64 {
    exp.derived.u_m_per_s * SpinLaw::new(theta0).cos_theta(drift_exponent(z, t, exp))
}

/// Runs one particle through magnet and drift region, calling `visit` with
/// (stage, time since entry, local time within the stage, z) at every node.
/// The seam node t = Δt is visited once, as the last in-magnet node.
fn drive<V>(z0: f64, theta0: f64, exp: &Experiment, steps: StepCounts, mut visit: V) -> Result<f64>
where
    V: FnMut(Stage, f64, f64, f64),
{
    steps.validate()?;
    let law = SpinLaw::new(theta0);
    let accel = exp.cfg.acceleration();
    let u = exp.derived.u_m_per_s;
    let dt = exp.derived.transit_time_s;

    let check = |phase: &'static str, t: f64, z: f64| {
        if z.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite { phase, t, z })
        }
    };

    let in_field = |t: f64, z: f64| accel * t * law.cos_theta(magnet_exponent(z, t, exp));
    let z_exit = ode::integrate(in_field, z0, dt, steps.in_magnet, |_, t, z| {
        check("in-magnet", t, z)?;
        visit(Stage::InMagnet, t, t, z);
        Ok(())
    })?;

    let drift = |t: f64, z: f64| u * law.cos_theta(drift_exponent(z, t, exp));
    ode::integrate(
        drift,
        z_exit,
        exp.derived.drift_time_s,
        steps.post_magnet,
        |k, t, z| {
            check("post-magnet", dt + t, z)?;
            if k > 0 {
                visit(Stage::PostMagnet, dt + t, t, z);
            }
            Ok(())
        },
    )
}

fn integrate_particle(
    z0: f64,
    orient: SpinOrientation,
    exp: &Experiment,
    steps: StepCounts,
) -> Result<Vec<TrajectorySample>> {
    let theta0 = orient.theta();
    let law = SpinLaw::new(theta0);
    let mut samples = Vec::with_capacity(steps.in_magnet + steps.post_magnet + 1);
    drive(z0, theta0, exp, steps, |stage, t, local, z| {
        let zeta = match stage {
            Stage::InMagnet => magnet_exponent(z, local, exp),
            Stage::PostMagnet => drift_exponent(z, local, exp),
        };
        samples.push(TrajectorySample {
            t_s: t,
            z_m: z,
            theta_rad: law.theta(zeta),
            phi_rad: orient.phi(),
            stage,
        });
    })?;
    Ok(samples)
}

/// Final z at the screen, without recording the path.
pub fn final_position(z0: f64, theta0: f64, exp: &Experiment, steps: StepCounts) -> Result<f64> {
    drive(z0, theta0, exp, steps, |_, _, _, _| {})
}

/// A's trajectory from magnet entry to the screen. φ stays at its initial
/// value: no azimuthal dynamics enter the velocity field.
pub fn integrate_a(
    init: &PairInitialConditions,
    exp: &Experiment,
    steps: StepCounts,
) -> Result<Vec<TrajectorySample>> {
    integrate_particle(init.z0_m, init.orient_a0, exp, steps)
}

/// B's spin orientation during the first step, opposite to A's.
pub fn mirror_spin_b(theta_a: f64, phi_a: f64) -> SpinOrientation {
    SpinOrientation::new(PI - theta_a, phi_a - PI)
}

/// Spot membership at the screen; z = 0 counts as +.
pub fn classify_outcome(final_sample: &TrajectorySample) -> Sign {
    classify_z(final_sample.z_m)
}

pub(crate) fn classify_z(z: f64) -> Sign {
    if z >= 0.0 {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

fn mirror_record(samples_a: &[TrajectorySample], z_b: f64) -> Vec<TrajectorySample> {
    samples_a
        .iter()
        .map(|s| TrajectorySample {
            t_s: s.t_s,
            z_m: z_b,
            theta_rad: PI - s.theta_rad,
            phi_rad: wrap_angle(s.phi_rad - PI),
            stage: s.stage,
        })
        .collect()
}

/// B's starting point and spin in the primed frame of the second magnet.
pub fn step2_initial_state(
    init: &PairInitialConditions,
    outcome_a: Sign,
    delta_rad: f64,
    exp: &Experiment,
) -> (PlanePoint, SpinOrientation) {
    let (s, c) = delta_rad.sin_cos();
    let start = PlanePoint {
        z_m: init.z0_b_m * c - init.x0_b_m * s,
        x_m: init.z0_b_m * s + init.x0_b_m * c,
    };
    let spin = rotate_basis_reflecting(conditional_b_after_a(outcome_a, exp).spin, delta_rad);
    let (orientation, _global_phase) =
        orientation_from_spinor(spin).expect("basis change preserves the norm");
    (start, orientation)
}

/// Second measurement step: B, conditioned on A's outcome, through the
/// magnet rotated by `delta_rad` about y.
pub fn step2_b_trajectory(
    init: &PairInitialConditions,
    outcome_a: Sign,
    delta_rad: f64,
    exp: &Experiment,
    steps: StepCounts,
) -> Result<Step2Record> {
    let (start, orientation) = step2_initial_state(init, outcome_a, delta_rad, exp);
    let samples = integrate_particle(start.z_m, orientation, exp, steps)?;
    let outcome = classify_outcome(samples.last().expect("trajectory has samples"));
    Ok(Step2Record {
        start,
        orientation,
        samples,
        outcome,
    })
}

pub fn simulate_pair(
    init: &PairInitialConditions,
    delta_rad: f64,
    exp: &Experiment,
    steps: StepCounts,
) -> Result<PairTrajectory> {
    let samples_a = integrate_a(init, exp, steps)?;
    let outcome_a = classify_outcome(samples_a.last().expect("trajectory has samples"));
    let samples_b_step1 = mirror_record(&samples_a, init.z0_b_m);
    let step2 = step2_b_trajectory(init, outcome_a, delta_rad, exp, steps)?;
    Ok(PairTrajectory {
        initial: *init,
        delta_rad,
        samples_a,
        samples_b_step1,
        step2,
        outcome_a,
    })
}

/// Outcomes of one pair and A's impact point, without the paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairOutcome {
    pub z_a_final_m: f64,
    pub outcome_a: Sign,
    pub outcome_b: Sign,
}

/// Same result as [`simulate_pair`] for the outcomes, without recording.
pub fn pair_outcome(
    init: &PairInitialConditions,
    delta_rad: f64,
    exp: &Experiment,
    steps: StepCounts,
) -> Result<PairOutcome> {
    let z_a = final_position(init.z0_m, init.orient_a0.theta(), exp, steps)?;
    let outcome_a = classify_z(z_a);
    let (start, orientation) = step2_initial_state(init, outcome_a, delta_rad, exp);
    let z_b = final_position(start.z_m, orientation.theta(), exp, steps)?;
    Ok(PairOutcome {
        z_a_final_m: z_a,
        outcome_a,
        outcome_b: classify_z(z_b),
    })
}
