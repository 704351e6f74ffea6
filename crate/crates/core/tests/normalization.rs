mod support;

use eprb_core::analytic::{
    density_marginal_a, density_marginal_b, density_step1, effective_wave_a, effective_wave_b,
    packet_f, two_body_step1, PlanePoint,
};
use eprb_core::{Experiment, SpinOrientation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI};
use support::quadrature::{nodes, trapezoid, trapezoid_2d};

const N: usize = 2001;

fn half_range(e: &Experiment, t: f64) -> f64 {
    6.0 * e.sigma0() + e.derived.branch_offset(t).abs()
}

#[test]
fn packet_norm() {
    let e = Experiment::default();
    let s = e.sigma0();
    let norm = trapezoid_2d(
        |x, z| packet_f(PlanePoint::new(x, z), s).powi(2),
        (-6.0 * s, 6.0 * s),
        (-6.0 * s, 6.0 * s),
        N,
    );
    assert!((norm - 1.0).abs() < 1e-6, "{norm}");
}

#[test]
fn two_body_state_norm() {
    let e = Experiment::default();
    let s = e.sigma0();
    let n = 61;
    for t in [0.0, e.derived.drift_time_s] {
        let za = half_range(&e, t);
        let grid_x = nodes(-6.0 * s, 6.0 * s, n);
        let grid_za = nodes(-za, za, n);
        let mut total = 0.0f64;
        for (xa, wxa) in grid_x.clone() {
            for (z_a, wza) in grid_za.clone() {
                for (xb, wxb) in grid_x.clone() {
                    for (zb, wzb) in grid_x.clone() {
                        let psi = two_body_step1(
                            PlanePoint::new(xa, z_a),
                            PlanePoint::new(xb, zb),
                            t,
                            &e,
                        );
                        total += wxa * wza * wxb * wzb * psi.norm_sqr();
                    }
                }
            }
        }
        assert!((total - 1.0).abs() < 1e-6, "t={t}: {total}");
    }
}

#[test]
fn step1_density_norm() {
    let e = Experiment::default();
    let s = e.sigma0();
    for t in [0.0, 1e-4, e.derived.drift_time_s] {
        let za = half_range(&e, t);
        let norm = trapezoid_2d(
            |a, b| density_step1(a, b, t, &e),
            (-za, za),
            (-6.0 * s, 6.0 * s),
            N,
        );
        assert!((norm - 1.0).abs() < 1e-6, "t={t}: {norm}");
    }
}

#[test]
fn marginal_a_norm() {
    let e = Experiment::default();
    for t in [0.0, 2e-4, e.derived.drift_time_s] {
        let za = half_range(&e, t);
        let norm = trapezoid(|z| density_marginal_a(z, t, &e), -za, za, N);
        assert!((norm - 1.0).abs() < 1e-8, "t={t}: {norm}");
    }
}

/// Integrating |Ψ|² over x_A and x_B reproduces the closed-form (z_A, z_B)
/// density.
#[test]
fn two_body_state_matches_step1_density() {
    let e = Experiment::default();
    let s = e.sigma0();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let t = rng.random_range(0.0..e.derived.drift_time_s);
        let za = rng.random_range(-half_range(&e, t)..half_range(&e, t));
        let zb = rng.random_range(-4.0 * s..4.0 * s);
        let integrated = trapezoid_2d(
            |xa, xb| {
                two_body_step1(PlanePoint::new(xa, za), PlanePoint::new(xb, zb), t, &e).norm_sqr()
            },
            (-7.0 * s, 7.0 * s),
            (-7.0 * s, 7.0 * s),
            201,
        );
        let closed = density_step1(za, zb, t, &e);
        assert!(
            (integrated - closed).abs() <= 1e-6 * closed.max(1e-300),
            "{integrated} vs {closed}"
        );
    }
}

#[test]
fn marginal_b_is_time_independent() {
    let e = Experiment::default();
    let t1 = e.derived.drift_time_s;
    for i in -50..=50 {
        let z = i as f64 * 1e-5;
        let v = density_marginal_b(z, &e);
        for t in [0.0, t1 / 2.0, t1] {
            let integrated = trapezoid(
                |za| density_step1(za, z, t, &e),
                -half_range(&e, t),
                half_range(&e, t),
                N,
            );
            assert!((integrated - v).abs() <= 1e-6 * v.max(1e-300));
        }
    }
}

#[test]
fn effective_wave_a_equator_gives_unpolarized_marginal() {
    let e = Experiment::default();
    let s = e.sigma0();
    let t = e.derived.drift_time_s;
    let o = SpinOrientation::new(FRAC_PI_2, 0.7);
    for i in -25..=25 {
        let z = i as f64 * 4e-5;
        let marginal = trapezoid(
            |x| effective_wave_a(PlanePoint::new(x, z), t, o, &e).norm_sqr(),
            -7.0 * s,
            7.0 * s,
            N,
        );
        let expected = density_marginal_a(z, t, &e);
        assert!(
            (marginal - expected).abs() <= 1e-6 * expected.max(1e-300),
            "z={z}"
        );
    }
}

#[test]
fn effective_waves_are_normalized() {
    let e = Experiment::default();
    let s = e.sigma0();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..4 {
        let o = SpinOrientation::new(rng.random_range(0.0..PI), rng.random_range(-PI..PI));
        let nb = trapezoid_2d(
            |x, z| effective_wave_b(PlanePoint::new(x, z), o, &e).norm_sqr(),
            (-6.0 * s, 6.0 * s),
            (-6.0 * s, 6.0 * s),
            N,
        );
        assert!((nb - 1.0).abs() < 1e-6, "{nb}");

        let t = rng.random_range(0.0..e.derived.drift_time_s);
        let za = half_range(&e, t);
        let na = trapezoid_2d(
            |x, z| effective_wave_a(PlanePoint::new(x, z), t, o, &e).norm_sqr(),
            (-6.0 * s, 6.0 * s),
            (-za, za),
            N,
        );
        assert!((na - 1.0).abs() < 1e-6, "{na}");
    }
}
