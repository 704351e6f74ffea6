//! B's starting position in the second step: independent draw versus a
//! copy of A's. The oracle below integrates the outcome probabilities
//! implied by the threshold structure of the flow: for fixed θ0 the
//! trajectories do not cross, so A lands on + iff Φ(z0/σ0) > sin²(θ0/2).

mod support;

use eprb_core::ensemble::{run_ensemble, EnsembleConfig, PositionModel};
use eprb_core::Experiment;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};
use std::f64::consts::FRAC_PI_4;
use support::quadrature::trapezoid;

/// E(δ) when B starts from A's initial point, in units where σ0 = 1.
fn shared_model_correlation(delta: f64) -> f64 {
    let n = Normal::standard();
    let (sn, cs) = delta.sin_cos();
    let q = n.inverse_cdf((delta / 2.0).sin().powi(2));
    // density of z0 given A = +, times P(B = + | z0, A = +) after
    // integrating out x0
    let p_plus = trapezoid(
        |s| 2.0 * n.cdf(s) * n.pdf(s) * n.cdf((s * cs - q) / sn),
        -10.0,
        10.0,
        4001,
    );
    2.0 * p_plus - 1.0
}

fn independent_model_correlation(delta: f64) -> f64 {
    let n = Normal::standard();
    let (sn, cs) = delta.sin_cos();
    let q = n.inverse_cdf((delta / 2.0).sin().powi(2));
    let p_plus = trapezoid(|s| n.pdf(s) * n.cdf((s * cs - q) / sn), -10.0, 10.0, 4001);
    2.0 * p_plus - 1.0
}

#[test]
fn oracle_reduces_to_cosine_for_independent_positions() {
    for delta in [0.3, FRAC_PI_4, 1.2, 2.0, 2.8] {
        assert!((independent_model_correlation(delta) - delta.cos()).abs() < 1e-9);
    }
    let shared = shared_model_correlation(FRAC_PI_4);
    assert!((shared - 0.886).abs() < 0.005, "{shared}");
}

#[test]
fn independent_positions_reproduce_cosine() {
    let e = Experiment::default();
    let ec = EnsembleConfig {
        n_pairs: 4000,
        delta_rad: FRAC_PI_4,
        seed: 31,
        ..Default::default()
    };
    let st = run_ensemble(&ec, &e).unwrap();
    assert!((st.correlation - FRAC_PI_4.cos()).abs() < 4.0 * st.correlation_stderr);
}

#[test]
fn shared_positions_bias_the_correlation() {
    let e = Experiment::default();
    let ec = EnsembleConfig {
        n_pairs: 4000,
        delta_rad: FRAC_PI_4,
        seed: 31,
        position_model: PositionModel::Shared,
        ..Default::default()
    };
    let st = run_ensemble(&ec, &e).unwrap();
    let oracle = shared_model_correlation(FRAC_PI_4);
    assert!(
        (st.correlation - oracle).abs() < 4.0 * st.correlation_stderr,
        "{} vs {oracle}",
        st.correlation
    );
    assert!(st.correlation - FRAC_PI_4.cos() > 0.1);
}
