use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::params::{derive_params, DerivedParams, PhysicalConfig};

/// A validated physical configuration together with its derived constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub cfg: PhysicalConfig,
    pub derived: DerivedParams,
}

impl Experiment {
    pub fn new(cfg: PhysicalConfig) -> Result<Self> {
        Ok(Self {
            derived: derive_params(&cfg)?,
            cfg,
        })
    }

    pub fn sigma0(&self) -> f64 {
        self.cfg.sigma0_m
    }

    /// Time from magnet entry to the detection screen, Δt + t1.
    pub fn detection_time(&self) -> f64 {
        self.derived.transit_time_s + self.derived.drift_time_s
    }

    /// Half-width of the detection window used for histograms and density
    /// grids: both spots at t1 plus six packet widths.
    pub fn screen_half_width(&self) -> f64 {
        self.derived.branch_offset(self.derived.drift_time_s) + 6.0 * self.sigma0()
    }
}

impl Default for Experiment {
    fn default() -> Self {
        Self::new(PhysicalConfig::default()).expect("default configuration is valid")
    }
}
