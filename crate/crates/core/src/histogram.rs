use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform-bin histogram on [lo, lo + bins·width) with out-of-range tallies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo_m: f64,
    pub bin_width_m: f64,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    /// Covers at least [lo, hi]; the upper edge is rounded up to a whole bin.
    pub fn new(lo: f64, hi: f64, bin_width: f64) -> Self {
        let bins = ((hi - lo) / bin_width - 1e-9).ceil().max(1.0) as usize;
        Self {
            lo_m: lo,
            bin_width_m: bin_width,
            counts: vec![0; bins],
            underflow: 0,
            overflow: 0,
        }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn edge(&self, i: usize) -> f64 {
        self.lo_m + i as f64 * self.bin_width_m
    }

    pub fn hi_m(&self) -> f64 {
        self.edge(self.bins())
    }

    pub fn add(&mut self, x: f64) {
        if x < self.lo_m {
            self.underflow += 1;
            return;
        }
        let i = ((x - self.lo_m) / self.bin_width_m).floor() as usize;
        match self.counts.get_mut(i) {
            Some(c) => *c += 1,
            None => self.overflow += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.underflow + self.overflow
    }

    /// Probability mass of `density` in each bin (composite Simpson, 16
    /// panels per bin).
    pub fn analytic_masses<F: Fn(f64) -> f64>(&self, density: F) -> Vec<f64> {
        (0..self.bins())
            .map(|i| simpson(&density, self.edge(i), self.edge(i + 1), 16))
            .collect()
    }
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let inner: f64 = (1..panels)
        .map(|k| {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            w * f(a + k as f64 * h)
        })
        .sum();
    h / 3.0 * (f(a) + inner + f(b))
}

/// Total-variation distance ½ Σ |empirical − analytic| between the
/// histogram and a normalized density. Counts outside the range are
/// compared with the density's mass outside the range as one extra cell.
pub fn tv_distance<F: Fn(f64) -> f64>(hist: &Histogram, density: F) -> Result<f64> {
    let total = hist.total();
    if total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let n = total as f64;
    let masses = hist.analytic_masses(density);
    let inside: f64 = hist
        .counts
        .iter()
        .zip(&masses)
        .map(|(&c, &m)| (c as f64 / n - m).abs())
        .sum();
    let outside_emp = (hist.underflow + hist.overflow) as f64 / n;
    let outside_ana = (1.0 - masses.iter().sum::<f64>()).max(0.0);
    Ok((0.5 * (inside + (outside_emp - outside_ana).abs())).clamp(0.0, 1.0))
}
