//! Deterministic simulation of the two-step EPR-B experiment with
//! de Broglie–Bohm trajectories.
//!
//! Two spin-½ atoms leave the source in the singlet state. A crosses a
//! Stern–Gerlach magnet along z while B only hits a screen; later B crosses
//! a second magnet rotated by δ about the flight axis. Each atom carries a
//! position and a spin orientation as hidden variables. The crate provides
//! the closed-form wave functions and densities ([`analytic`]), the pair
//! trajectories ([`trajectory`]) and Monte Carlo statistics over the hidden
//! variables ([`ensemble`]).

pub mod analytic;
pub mod ensemble;
mod error;
mod experiment;
pub mod histogram;
pub mod ode;
pub mod params;
pub mod rng;
pub mod spin;
pub mod trajectory;

pub use error::{Error, Result};
pub use experiment::Experiment;
pub use params::{derive_params, DerivedParams, PhysicalConfig};
pub use spin::{Sign, SpinOrientation, Spinor, TwoBodySpinor};
