#![allow(dead_code)]

use std::f64::consts::PI;

use helfrich::{Grid, ProfileCurve};
use rand::{Rng, RngExt};

/// Random admissible profile `alpha + sum c_k (cos k pi x - (-1)^k)`,
/// k = 1..=modes. Every term vanishes with its slope at `x = +-1`, and the
/// coefficients are scaled so that `u >= alpha / 2`.
pub fn random_admissible(alpha: f64, modes: usize, grid: Grid, rng: &mut impl Rng) -> ProfileCurve {
    let raw: Vec<f64> = (1..=modes)
        .map(|k| rng.random_range(-1.0..1.0) / (k * k) as f64)
        .collect();
    let budget: f64 = raw.iter().map(|c| 2.0 * c.abs()).sum();
    let scale = rng.random_range(0.05..0.5) * alpha / budget.max(1e-12);
    let coef: Vec<f64> = raw.iter().map(|c| c * scale).collect();
    from_modes(alpha, &coef, grid)
}

pub fn from_modes(alpha: f64, coef: &[f64], grid: Grid) -> ProfileCurve {
    ProfileCurve::sample_admissible(alpha, grid, |x| {
        let mut u = alpha;
        let mut du = 0.0;
        for (i, c) in coef.iter().enumerate() {
            let k = (i + 1) as f64 * PI;
            let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
            u += c * ((k * x).cos() - sign);
            du -= c * k * (k * x).sin();
        }
        (u, du)
    })
    .expect("random profile is admissible")
}

/// Sup of `|u - target|` over 16 points per element of `[0, 1]`.
pub fn sup_distance(curve: &ProfileCurve, target: impl Fn(f64) -> f64) -> f64 {
    let nodes = curve.grid().nodes();
    let mut sup = 0.0f64;
    for w in nodes.windows(2) {
        for k in 0..=16 {
            let x = w[0] + (w[1] - w[0]) * k as f64 / 16.0;
            sup = sup.max((curve.eval_half(x).0 - target(x)).abs());
        }
    }
    sup
}
