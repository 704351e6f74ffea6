//! Closed-form wave functions and densities for both measurement steps.
//!
//! The time-dependent phases φ±(t) that multiply the post-magnet packets
//! are taken to be zero. They are global per branch and drop out of every
//! density, branch weight and velocity computed here.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::experiment::Experiment;
use crate::params::{DerivedParams, HBAR};
use crate::spin::{
    rotate_basis_reflecting, spinor_from_orientation, Sign, SpinOrientation, Spinor, TwoBodySpinor,
};

/// Transverse position r = (x, z); y is treated classically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub x_m: f64,
    pub z_m: f64,
}

impl PlanePoint {
    pub const ORIGIN: PlanePoint = PlanePoint { x_m: 0.0, z_m: 0.0 };

    pub fn new(x_m: f64, z_m: f64) -> Self {
        Self { x_m, z_m }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchWeights {
    pub p_plus: f64,
    pub p_minus: f64,
}

/// Unnormalized spinor-valued amplitude ψ(r) = (ψ₊(r), ψ₋(r)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorField {
    pub plus: Complex64,
    pub minus: Complex64,
}

impl SpinorField {
    pub fn norm_sqr(&self) -> f64 {
        self.plus.norm_sqr() + self.minus.norm_sqr()
    }
}

/// Centre and width of a Gaussian packet of the same shape as `packet_f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub center: PlanePoint,
    pub sigma_m: f64,
}

impl GaussianPacket {
    pub fn amplitude(&self, r: PlanePoint) -> f64 {
        packet_f(
            PlanePoint::new(r.x_m - self.center.x_m, r.z_m - self.center.z_m),
            self.sigma_m,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalState {
    pub spin: Spinor,
    pub packet: GaussianPacket,
}

/// Normal density N(0, σ²) evaluated at `z`.
fn gaussian(z: f64, sigma: f64) -> f64 {
    (2.0 * PI * sigma * sigma).powf(-0.5) * (-z * z / (2.0 * sigma * sigma)).exp()
}

/// f(r) = (2πσ0²)^{-1/2} exp(−(x² + z²)/4σ0²), normalized so ∫|f|² = 1.
pub fn packet_f(r: PlanePoint, sigma0: f64) -> f64 {
    (2.0 * PI * sigma0 * sigma0).powf(-0.5)
        * (-(r.x_m * r.x_m + r.z_m * r.z_m) / (4.0 * sigma0 * sigma0)).exp()
}

/// Spin-branch packet after the magnet, `t` seconds after the exit:
/// f(x, z ∓ (z_Δ + ut)) e^{±i m u z/ħ}.
pub fn packet_f_pm(
    r: PlanePoint,
    t: f64,
    sign: Sign,
    d: &DerivedParams,
    sigma0: f64,
    mass: f64,
) -> Complex64 {
    let s = sign.value();
    let shifted = PlanePoint::new(r.x_m, r.z_m - s * d.branch_offset(t));
    let phase = s * mass * d.u_m_per_s * r.z_m / HBAR;
    Complex64::from_polar(packet_f(shifted, sigma0), phase)
}

fn branch(exp: &Experiment, r: PlanePoint, t: f64, sign: Sign) -> Complex64 {
    packet_f_pm(r, t, sign, &exp.derived, exp.sigma0(), exp.cfg.mass_kg)
}

/// Two-body state `t` seconds after A leaves its magnet:
/// (1/√2) f(r_B) (f⁺(r_A)|+−⟩ − f⁻(r_A)|−+⟩).
pub fn two_body_step1(r_a: PlanePoint, r_b: PlanePoint, t: f64, exp: &Experiment) -> TwoBodySpinor {
    let fb = packet_f(r_b, exp.sigma0()) / 2f64.sqrt();
    let mut psi = TwoBodySpinor::zero();
    psi.set(
        Sign::Plus,
        Sign::Minus,
        fb * branch(exp, r_a, t, Sign::Plus),
    );
    psi.set(
        Sign::Minus,
        Sign::Plus,
        -fb * branch(exp, r_a, t, Sign::Minus),
    );
    psi
}

/// Joint density of (z_A, z_B) after integrating out x_A and x_B.
pub fn density_step1(z_a: f64, z_b: f64, t: f64, exp: &Experiment) -> f64 {
    density_marginal_b(z_b, exp) * density_marginal_a(z_a, t, exp)
}

/// Equal-weight mixture of the two spots centred at ±(z_Δ + ut).
pub fn density_marginal_a(z_a: f64, t: f64, exp: &Experiment) -> f64 {
    let a = exp.derived.branch_offset(t);
    let s = exp.sigma0();
    0.5 * (gaussian(z_a - a, s) + gaussian(z_a + a, s))
}

/// B's density does not depend on time: its packet never enters a field
/// during the first step.
pub fn density_marginal_b(z_b: f64, exp: &Experiment) -> f64 {
    gaussian(z_b, exp.sigma0())
}

/// z-density of a single, unentangled atom with spin `orient` through the
/// same magnet, `t` seconds after the exit.
pub fn stern_gerlach_density(z: f64, t: f64, orient: SpinOrientation, exp: &Experiment) -> f64 {
    let spin = spinor_from_orientation(orient);
    let a = exp.derived.branch_offset(t);
    let s = exp.sigma0();
    spin.amp_plus.norm_sqr() * gaussian(z - a, s) + spin.amp_minus.norm_sqr() * gaussian(z + a, s)
}

/// Single-atom density for an unpolarized beam, i.e. the spin density
/// matrix ½·1, written as the average over the two s_z eigenstates.
pub fn unpolarized_stern_gerlach_density(z: f64, t: f64, exp: &Experiment) -> f64 {
    let up = SpinOrientation::new(0.0, 0.0);
    0.5 * (stern_gerlach_density(z, t, up, exp) + stern_gerlach_density(z, t, up.opposite(), exp))
}

/// Distance between the centres of the spin-up and spin-down spots.
pub fn spot_separation(t: f64, d: &DerivedParams) -> f64 {
    2.0 * d.branch_offset(t)
}

/// B's state right after A is found with `outcome_a`: spin opposite to A,
/// spatial packet untouched.
pub fn conditional_b_after_a(outcome_a: Sign, exp: &Experiment) -> ConditionalState {
    ConditionalState {
        spin: Spinor::basis(outcome_a.flip()),
        packet: GaussianPacket {
            center: PlanePoint::ORIGIN,
            sigma_m: exp.sigma0(),
        },
    }
}

/// Probabilities of the two primed-frame outcomes for B, given A's outcome.
pub fn branch_weights_b(outcome_a: Sign, delta_rad: f64) -> BranchWeights {
    let primed = rotate_basis_reflecting(Spinor::basis(outcome_a.flip()), delta_rad);
    BranchWeights {
        p_plus: primed.amp_plus.norm_sqr(),
        p_minus: primed.amp_minus.norm_sqr(),
    }
}

/// Effective single-particle wave function of A after the magnet, with
/// initial spin `orient0`.
pub fn effective_wave_a(
    r_a: PlanePoint,
    t: f64,
    orient0: SpinOrientation,
    exp: &Experiment,
) -> SpinorField {
    let spin = spinor_from_orientation(orient0);
    SpinorField {
        plus: spin.amp_plus * branch(exp, r_a, t, Sign::Plus),
        minus: spin.amp_minus * branch(exp, r_a, t, Sign::Minus),
    }
}

/// Effective wave function of B during the first step: the initial packet
/// carrying the spin orientation slaved to A.
pub fn effective_wave_b(
    r_b: PlanePoint,
    orient_b: SpinOrientation,
    exp: &Experiment,
) -> SpinorField {
    let f = packet_f(r_b, exp.sigma0());
    let spin = spinor_from_orientation(orient_b);
    SpinorField {
        plus: spin.amp_plus * f,
        minus: spin.amp_minus * f,
    }
}
