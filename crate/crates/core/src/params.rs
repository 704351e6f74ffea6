//! Experimental constants and the quantities derived from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Atomic magnetic moment that makes the silver-atom setup land exactly on
/// z_Δ = 1e-5 m and u = 1 m/s. This is about 3% below the Bohr magneton
/// (9.274e-24 J/T).
pub const DEFAULT_MAGNETIC_MOMENT: f64 = 9.0e-24;

/// Physical setup of both Stern–Gerlach arms, in SI units.
///
/// The magnetic moment is the atom's moment, not the vacuum permeability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicalConfig {
    pub mass_kg: f64,
    #[serde(rename = "magnetic_moment_J_per_T")]
    pub magnetic_moment_j_per_t: f64,
    pub v_y_m_per_s: f64,
    /// Width of the initial Gaussian packet.
    pub sigma0_m: f64,
    /// Uniform field component. No implemented observable depends on it.
    #[serde(rename = "B0_T")]
    pub b0_t: f64,
    #[serde(rename = "B_gradient_T_per_m")]
    pub b_gradient_t_per_m: f64,
    pub magnet_length_m: f64,
    /// Distance from the magnet exit to the detection screen.
    pub drift_distance_m: f64,
}

impl Default for PhysicalConfig {
    /// Silver atoms through a 1 cm magnet with a 1e3 T/m gradient, screen at 20 cm.
    fn default() -> Self {
        Self {
            mass_kg: 1.8e-25,
            magnetic_moment_j_per_t: DEFAULT_MAGNETIC_MOMENT,
            v_y_m_per_s: 500.0,
            sigma0_m: 1e-4,
            b0_t: 5.0,
            b_gradient_t_per_m: 1e3,
            magnet_length_m: 0.01,
            drift_distance_m: 0.20,
        }
    }
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}

impl PhysicalConfig {
    pub fn validate(&self) -> Result<()> {
        positive("mass_kg", self.mass_kg)?;
        positive("magnetic_moment_J_per_T", self.magnetic_moment_j_per_t)?;
        positive("v_y_m_per_s", self.v_y_m_per_s)?;
        positive("sigma0_m", self.sigma0_m)?;
        if !(self.b0_t.is_finite() && self.b0_t >= 0.0) {
            return Err(Error::InvalidParameter {
                field: "B0_T",
                reason: format!("must be finite and >= 0, got {}", self.b0_t),
            });
        }
        positive("B_gradient_T_per_m", self.b_gradient_t_per_m)?;
        positive("magnet_length_m", self.magnet_length_m)?;
        positive("drift_distance_m", self.drift_distance_m)?;
        Ok(())
    }

    /// Coefficient of t in the in-magnet acceleration law, μ B'0 / m.
    pub fn acceleration(&self) -> f64 {
        self.magnetic_moment_j_per_t * self.b_gradient_t_per_m / self.mass_kg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// Time spent inside the magnet, Δt = Δl / v_y.
    pub transit_time_s: f64,
    /// Displacement of each spin branch at the magnet exit.
    pub z_delta_m: f64,
    /// Transverse speed of each spin branch after the magnet.
    pub u_m_per_s: f64,
    /// Flight time from magnet exit to screen, t1 = D / v_y.
    pub drift_time_s: f64,
}

impl DerivedParams {
    /// Offset of each branch centre at time `t` after the magnet exit.
    pub fn branch_offset(&self, t: f64) -> f64 {
        self.z_delta_m + self.u_m_per_s * t
    }
}

pub fn derive_params(cfg: &PhysicalConfig) -> Result<DerivedParams> {
    cfg.validate()?;
    let dt = cfg.magnet_length_m / cfg.v_y_m_per_s;
    let accel = cfg.acceleration();
    Ok(DerivedParams {
        transit_time_s: dt,
        z_delta_m: accel * dt * dt / 2.0,
        u_m_per_s: accel * dt,
        drift_time_s: cfg.drift_distance_m / cfg.v_y_m_per_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn silver_atom_defaults() {
        let d = derive_params(&PhysicalConfig::default()).unwrap();
        assert!(rel(d.transit_time_s, 2e-5) < 1e-12);
        assert!(rel(d.z_delta_m, 1e-5) < 1e-12);
        assert!(rel(d.u_m_per_s, 1.0) < 1e-12);
        assert!(rel(d.drift_time_s, 4e-4) < 1e-12);
    }

    #[test]
    fn doubling_gradient_doubles_displacement() {
        let base = PhysicalConfig::default();
        let doubled = PhysicalConfig {
            b_gradient_t_per_m: 2.0 * base.b_gradient_t_per_m,
            ..base
        };
        let a = derive_params(&base).unwrap();
        let b = derive_params(&doubled).unwrap();
        assert!(rel(b.z_delta_m, 2.0 * a.z_delta_m) < 1e-14);
        assert!(rel(b.u_m_per_s, 2.0 * a.u_m_per_s) < 1e-14);
        assert_eq!(a.transit_time_s, b.transit_time_s);
    }

    #[test]
    fn short_magnet_limit() {
        let cfg = PhysicalConfig {
            magnet_length_m: 1e-12,
            ..PhysicalConfig::default()
        };
        let d = derive_params(&cfg).unwrap();
        assert!(d.transit_time_s < 1e-14);
        assert!(d.z_delta_m < 1e-24);
        assert!(d.u_m_per_s < 1e-9);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        for cfg in [
            PhysicalConfig {
                v_y_m_per_s: 0.0,
                ..Default::default()
            },
            PhysicalConfig {
                v_y_m_per_s: -1.0,
                ..Default::default()
            },
            PhysicalConfig {
                magnet_length_m: 0.0,
                ..Default::default()
            },
            PhysicalConfig {
                mass_kg: f64::NAN,
                ..Default::default()
            },
        ] {
            assert!(matches!(
                derive_params(&cfg),
                Err(Error::InvalidParameter { .. })
            ));
        }
        let zero_field = PhysicalConfig {
            b0_t: 0.0,
            ..Default::default()
        };
        assert!(derive_params(&zero_field).is_ok());
    }

    proptest! {
        #[test]
        fn exit_speed_times_transit_is_twice_displacement(
            mass in 1e-27f64..1e-23,
            moment in 1e-25f64..1e-22,
            vy in 10.0f64..5000.0,
            grad in 1.0f64..1e5,
            len in 1e-4f64..1.0,
        ) {
            let cfg = PhysicalConfig {
                mass_kg: mass,
                magnetic_moment_j_per_t: moment,
                v_y_m_per_s: vy,
                b_gradient_t_per_m: grad,
                magnet_length_m: len,
                ..Default::default()
            };
            let d = derive_params(&cfg).unwrap();
            let lhs = d.u_m_per_s * d.transit_time_s;
            prop_assert!(((lhs - 2.0 * d.z_delta_m) / lhs).abs() < 1e-14);
        }
    }
}
