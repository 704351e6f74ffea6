//! Fixed-step classical Runge–Kutta for scalar ODEs dy/dt = f(t, y).

/// One RK4 step of size `h` from (t, y).
#[inline]
pub fn rk4_step<F: Fn(f64, f64) -> f64>(f: &F, t: f64, y: f64, h: f64) -> f64 {
    let half = 0.5 * h;
    let k1 = f(t, y);
    let k2 = f(t + half, y + half * k1);
    let k3 = f(t + half, y + half * k2);
    let k4 = f(t + h, y + h * k3);
    y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Node `k` of a uniform grid of `steps` intervals on [0, span]. The last
/// node is exactly `span`.
#[inline]
pub fn grid_time(span: f64, k: usize, steps: usize) -> f64 {
    if k == steps {
        span
    } else {
        span * k as f64 / steps as f64
    }
}

/// Integrates over [0, span] in `steps` equal steps, calling `visit(k, t, y)`
/// at every node including the initial one. Stops early and returns `Err`
/// with the offending node if `visit` rejects a state.
pub fn integrate<F, V, E>(f: F, y0: f64, span: f64, steps: usize, mut visit: V) -> Result<f64, E>
where
    F: Fn(f64, f64) -> f64,
    V: FnMut(usize, f64, f64) -> Result<(), E>,
{
    let mut y = y0;
    visit(0, 0.0, y)?;
    for k in 0..steps {
        let t = grid_time(span, k, steps);
        let t_next = grid_time(span, k + 1, steps);
        y = rk4_step(&f, t, y, t_next - t);
        visit(k + 1, t_next, y)?;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run<F: Fn(f64, f64) -> f64>(f: F, y0: f64, span: f64, steps: usize) -> f64 {
        integrate::<_, _, ()>(f, y0, span, steps, |_, _, _| Ok(())).unwrap()
    }

    #[test]
    fn exact_for_cubic_in_time() {
        // y' = 3t² + 2t integrates exactly under RK4
        let y = run(|t, _| 3.0 * t * t + 2.0 * t, 1.0, 2.0, 7);
        assert!((y - (1.0 + 8.0 + 4.0)).abs() < 1e-12);
    }

    #[test]
    fn fourth_order_on_exponential() {
        let err = |n| (run(|_, y| y, 1.0, 1.0, n) - 1f64.exp()).abs();
        let ratio = err(20) / err(40);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn visitor_sees_every_node_and_can_abort() {
        let mut ts = Vec::new();
        run(|_, _| 0.0, 0.0, 1.0, 4);
        integrate::<_, _, ()>(
            |_, _| 1.0,
            0.0,
            1.0,
            4,
            |k, t, _| {
                ts.push((k, t));
                Ok(())
            },
        )
        .unwrap();
        assert_eq!(ts.len(), 5);
        assert_eq!(ts[4], (4, 1.0));

        let res = integrate(
            |_, y| y,
            1.0,
            1.0,
            10,
            |k, _, _| if k == 3 { Err(k) } else { Ok(()) },
        );
        assert_eq!(res, Err(3));
    }
}
