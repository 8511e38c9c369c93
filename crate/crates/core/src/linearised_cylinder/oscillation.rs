use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots::bisect_full;

/// `h(x) = A cosh(ax) cos(ax) - B sinh(ax) sin(ax)` with `h'` and `h''`.
pub fn oscillation_h(a_coef: f64, b_coef: f64, a: f64, x: f64) -> Result<(f64, f64, f64)> {
    if a_coef == 0.0 && b_coef == 0.0 {
        return Err(Error::DegenerateCoefficients);
    }
    Ok(h_jet(a_coef, b_coef, a, x))
}

#[inline]
fn h_jet(ca: f64, cb: f64, a: f64, x: f64) -> (f64, f64, f64) {
    let t = a * x;
    let (s, c) = t.sin_cos();
    let (sh, ch) = (t.sinh(), t.cosh());
    let h = ca * ch * c - cb * sh * s;
    let d1 = a * ((ca - cb) * sh * c - (ca + cb) * ch * s);
    let d2 = a * a * (-2.0 * ca * sh * s - 2.0 * cb * ch * c);
    (h, d1, d2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseSample {
    pub x: f64,
    pub e: f64,
    pub f: f64,
    pub phi: f64,
    pub dphi: f64,
    pub psi: f64,
    pub dpsi: f64,
}

/// Envelopes and phases with `h = sgn(A) E cos(ax + phi)` and
/// `h' = a F cos(ax + psi)`. Phase derivatives are taken with respect to `x`.
pub fn phase_functions(a_coef: f64, b_coef: f64, a: f64, x: f64) -> Result<PhaseSample> {
    if a_coef == 0.0 && b_coef == 0.0 {
        return Err(Error::DegenerateCoefficients);
    }
    if a_coef == 0.0 {
        return Err(Error::PhaseUndefined("A = 0 leaves phi without a branch"));
    }
    if a_coef + b_coef == 0.0 {
        return Err(Error::PhaseUndefined("A + B = 0 leaves psi' without a closed form"));
    }
    let t = a * x;
    let (sh, ch) = (t.sinh(), t.cosh());
    let y = t.tanh();
    let (p, q) = (a_coef, b_coef);
    let e = (p * p * ch * ch + q * q * sh * sh).sqrt();
    let f = ((p + q).powi(2) * ch * ch + (p - q).powi(2) * sh * sh).sqrt();
    let k = q / p;
    let phi = (k * y).atan();
    let dphi = a * k * (1.0 - (1.0 + k * k) * y * y / (1.0 + k * k * y * y));
    let psi = ((p + q) * ch).atan2((p - q) * sh);
    let k2 = (q - p) / (p + q);
    let dpsi = a * k2 * (1.0 - (1.0 + k2 * k2) * y * y / (1.0 + k2 * k2 * y * y));
    Ok(PhaseSample { x, e, f, phi, dphi, psi, dpsi })
}

/// For `K < -1`, the point `y*` in `(0, 1/sqrt 2)` where
/// `1 + K eta(y*) = 0` with `eta(y) = 1 - (1 + K^2) y^2 / (1 + K^2 y^2)`.
pub fn eta_crossing(k: f64) -> Option<f64> {
    (k < -1.0).then(|| ((1.0 + 1.0 / k) / (1.0 - k)).sqrt())
}

pub fn eta_function(k: f64, y: f64) -> f64 {
    1.0 - (1.0 + k * k) * y * y / (1.0 + k * k * y * y)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationReport {
    #[serde(rename = "A")]
    pub a_coef: f64,
    #[serde(rename = "B")]
    pub b_coef: f64,
    pub a: f64,
    pub x_max: f64,
    /// `(x, h(x))` at the zeros of `h'` in `[0, x_max]`, including `x = 0`.
    pub extrema: Vec<(f64, f64)>,
    /// Phase samples; empty when `A = 0` or `A + B = 0`.
    pub phases: Vec<PhaseSample>,
    pub abs_monotone: bool,
    /// Crossing point for `K = B/A`, if any.
    pub y_star: Option<f64>,
}

/// Extrema of `h` on `[0, x_max]` by sign scan of `h'` and bisection.
pub fn oscillation_extrema(a_coef: f64, b_coef: f64, a: f64, x_max: f64) -> Result<OscillationReport> {
    if a_coef == 0.0 && b_coef == 0.0 {
        return Err(Error::DegenerateCoefficients);
    }
    if !(a > 0.0 && x_max > 0.0) {
        return Err(Error::InvalidInput("a and x_max must be positive".into()));
    }
    let dh = |x: f64| h_jet(a_coef, b_coef, a, x).1;
    // the phases advance at most at rate a (1 + |K|); keep eight samples per half turn
    let rate = 1.0
        + if a_coef != 0.0 { (b_coef / a_coef).abs() } else { 0.0 }
        + if a_coef + b_coef != 0.0 {
            ((b_coef - a_coef) / (a_coef + b_coef)).abs()
        } else {
            0.0
        };
    let rate = if a_coef == 0.0 || a_coef + b_coef == 0.0 { rate.max(8.0) } else { rate };
    let step = PI / (8.0 * a * rate.min(1e4));
    let n = ((x_max / step).ceil() as usize).max(16);
    let mut extrema = vec![(0.0, h_jet(a_coef, b_coef, a, 0.0).0)];
    let start = 1e-9 * x_max.min(1.0 / a);
    let mut x_prev = start;
    let mut d_prev = dh(start);
    for i in 1..=n {
        let x = start + (x_max - start) * i as f64 / n as f64;
        let d = dh(x);
        if d == 0.0 {
            extrema.push((x, h_jet(a_coef, b_coef, a, x).0));
        } else if d_prev != 0.0 && d.signum() != d_prev.signum() {
            let r = bisect_full(dh, x_prev, x)?;
            extrema.push((r, h_jet(a_coef, b_coef, a, r).0));
        }
        x_prev = x;
        d_prev = d;
    }
    let abs_monotone = extrema.windows(2).all(|w| w[1].1.abs() > w[0].1.abs());
    let phases = if a_coef != 0.0 && a_coef + b_coef != 0.0 {
        (0..=64)
            .map(|i| phase_functions(a_coef, b_coef, a, x_max * i as f64 / 64.0))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let y_star = if a_coef != 0.0 { eta_crossing(b_coef / a_coef) } else { None };
    Ok(OscillationReport {
        a_coef,
        b_coef,
        a,
        x_max,
        extrema,
        phases,
        abs_monotone,
        y_star,
    })
}

/// Coefficients whose `h` peaks at `x = 1` on `[0, 1]`.
pub fn peak_at_one_coefficients(a: f64) -> (f64, f64) {
    let (s, c) = a.sin_cos();
    let (sh, ch) = (a.sinh(), a.cosh());
    (sh * c + ch * s, sh * c - ch * s)
}

/// `f(x) = tanh(x) / tan(x)`, with `f(0) = 1`.
pub fn tanh_tan_ratio(x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(1.0);
    }
    let k = (x / PI).round();
    if k != 0.0 && (x - k * PI).abs() <= 1e-12 * x.abs().max(1.0) {
        return Err(Error::PoleAtMultipleOfPi { x });
    }
    let (s, c) = x.sin_cos();
    Ok(x.tanh() * c / s)
}

/// `cosh(a) sin(a) sinh(x) cos(x) - sinh(a) cos(a) cosh(x) sin(x)`.
pub fn sign_expression(a: f64, x: f64) -> f64 {
    let (sa, ca) = a.sin_cos();
    let (sx, cx) = x.sin_cos();
    a.cosh() * sa * x.sinh() * cx - a.sinh() * ca * x.cosh() * sx
}

/// Whether the sign expression is positive at `x` in `(0, a)`.
pub fn sign_inequality(a: f64, x: f64) -> Result<bool> {
    if !(a > 0.0 && x > 0.0 && x < a) {
        return Err(Error::InvalidInput(format!("need 0 < x < a, got x = {x}, a = {a}")));
    }
    Ok(sign_expression(a, x) > 0.0)
}

/// First sampled point of `(0, a)` (out of `n` uniform samples) where the
/// sign expression is not positive.
pub fn find_sign_violation(a: f64, n: usize) -> Option<f64> {
    (1..n)
        .map(|k| a * k as f64 / n as f64)
        .find(|&x| sign_expression(a, x) <= 0.0)
}
