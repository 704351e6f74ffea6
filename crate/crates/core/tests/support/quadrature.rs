//! Composite trapezoid rules used as independent oracles.

#![allow(dead_code)]

pub fn nodes(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = (f64, f64)> + Clone {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |i| {
        let w = if i == 0 || i == n - 1 { 0.5 * h } else { h };
        (lo + i as f64 * h, w)
    })
}

pub fn trapezoid<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> f64 {
    nodes(lo, hi, n).map(|(x, w)| w * f(x)).sum()
}

pub fn trapezoid_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    (xlo, xhi): (f64, f64),
    (ylo, yhi): (f64, f64),
    n: usize,
) -> f64 {
    nodes(xlo, xhi, n)
        .map(|(x, wx)| wx * nodes(ylo, yhi, n).map(|(y, wy)| wy * f(x, y)).sum::<f64>())
        .sum()
}
