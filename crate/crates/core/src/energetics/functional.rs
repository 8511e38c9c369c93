use std::f64::consts::PI;

use serde::Serialize;

use crate::profile_geometry::{hermite_basis, ProfileCurve};
use crate::quadrature::UnitRule;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    pub area: f64,
    pub willmore: f64,
    pub helfrich: f64,
    pub epsilon: f64,
    /// `epsilon * area`
    pub area_term: f64,
    /// `area * willmore - 4 pi^2`
    pub product_bound_slack: f64,
    /// `W / sqrt(16 pi^2 - W^2)` when `W < 4 pi`, otherwise infinite.
    pub gradient_bound: f64,
}

/// Willmore density `(1/(u s) - q/s^3)^2 u s` with `s = sqrt(1 + p^2)`.
#[inline]
pub(crate) fn willmore_density(u: f64, p: f64, q: f64) -> f64 {
    let s = (1.0 + p * p).sqrt();
    let d = 1.0 / (u * s) - q / (s * s * s);
    d * d * u * s
}

/// Area and Willmore energy in one pass; infinite if the interpolant
/// touches zero at a quadrature point.
pub(crate) fn area_and_willmore(curve: &ProfileCurve) -> (f64, f64) {
    let grid = curve.grid();
    let rule = grid.rule();
    let mut area = 0.0;
    let mut willmore = 0.0;
    for e in 0..grid.n_elements() {
        let h = grid.width(e);
        let (mut ae, mut we) = (0.0, 0.0);
        for (&t, &w) in rule.points.iter().zip(&rule.weights) {
            let (u, p, q) = curve.element_jet(e, t);
            if !(u > 0.0) {
                return (f64::INFINITY, f64::INFINITY);
            }
            ae += w * u * (1.0 + p * p).sqrt();
            we += w * willmore_density(u, p, q);
        }
        area += h * ae;
        willmore += h * we;
    }
    // mirrored half doubles both integrals
    (4.0 * PI * area, PI * willmore)
}

pub fn area(curve: &ProfileCurve) -> f64 {
    area_and_willmore(curve).0
}

pub fn willmore(curve: &ProfileCurve) -> f64 {
    area_and_willmore(curve).1
}

pub fn report_from_parts(area: f64, willmore: f64, epsilon: f64) -> EnergyReport {
    let four_pi = 4.0 * PI;
    let gradient_bound = if willmore < four_pi {
        willmore / (four_pi * four_pi - willmore * willmore).sqrt()
    } else {
        f64::INFINITY
    };
    EnergyReport {
        area,
        willmore,
        helfrich: willmore + epsilon * area,
        epsilon,
        area_term: epsilon * area,
        product_bound_slack: area * willmore - 4.0 * PI * PI,
        gradient_bound,
    }
}

pub fn helfrich(curve: &ProfileCurve, epsilon: f64) -> EnergyReport {
    let (a, w) = area_and_willmore(curve);
    report_from_parts(a, w, epsilon)
}

/// Value of the discrete Helfrich energy.
pub fn helfrich_value(curve: &ProfileCurve, epsilon: f64) -> f64 {
    let (a, w) = area_and_willmore(curve);
    w + epsilon * a
}

/// Gradient of the discrete Helfrich energy with respect to the free
/// degrees of freedom (see [`ProfileCurve::free_dofs`]).
pub fn helfrich_gradient(curve: &ProfileCurve, epsilon: f64) -> Vec<f64> {
    let grid = curve.grid();
    let n = grid.n_elements();
    let rule: &UnitRule = grid.rule();
    let mut grad = vec![0.0; 2 * n - 1];
    let half_pi = 0.5 * PI;
    let two_pi_eps = 2.0 * PI * epsilon;
    for e in 0..n {
        let h = grid.width(e);
        let idx = [
            curve.value_index(e),
            curve.slope_index(e),
            curve.value_index(e + 1),
            curve.slope_index(e + 1),
        ];
        let mut local = [0.0; 4];
        for (&t, &w) in rule.points.iter().zip(&rule.weights) {
            let (u, p, q) = curve.element_jet(e, t);
            let s2 = 1.0 + p * p;
            let s = s2.sqrt();
            let s3 = s2 * s;
            let s5 = s3 * s2;
            let s7 = s5 * s2;
            // partial derivatives of (pi/2)(1/(us) - 2q/s^3 + u q^2/s^5) + 2 pi eps u s
            let fu = half_pi * (-1.0 / (u * u * s) + q * q / s5) + two_pi_eps * s;
            let fp = half_pi * (-p / (u * s3) + 6.0 * q * p / s5 - 5.0 * u * q * q * p / s7)
                + two_pi_eps * u * p / s;
            let fq = half_pi * (-2.0 / s3 + 2.0 * u * q / s5);
            let (nb, db, ddb) = hermite_basis(t, h);
            for k in 0..4 {
                local[k] += w * (fu * nb[k] + fp * db[k] + fq * ddb[k]);
            }
        }
        for k in 0..4 {
            if let Some(i) = idx[k] {
                grad[i] += 2.0 * h * local[k];
            }
        }
    }
    grad
}

/// The three integrals of the Willmore identity over `[a, b]`:
/// `int (A - B)^2 u s`, `int (A^2 + B^2) u s - 2 [p/s]` and
/// `int (A + B)^2 u s - 4 [p/s]` with `A = 1/(u s)`, `B = u''/s^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub first: f64,
    pub second: f64,
    pub third: f64,
    /// `[p / s]` evaluated between `a` and `b`.
    pub boundary: f64,
}

pub fn willmore_identity_check(curve: &ProfileCurve, a: f64, b: f64) -> IdentityCheck {
    let nodes = curve.grid().nodes();
    let mut breaks: Vec<f64> = nodes
        .iter()
        .flat_map(|&x| [x, -x])
        .filter(|&x| x > a && x < b)
        .collect();
    breaks.push(a);
    breaks.push(b);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let rule = UnitRule::new(curve.grid().quadrature_order().max(8));
    let (mut i1, mut i2, mut i3) = (0.0, 0.0, 0.0);
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        for (&t, &wt) in rule.points.iter().zip(&rule.weights) {
            let x = lo + (hi - lo) * t;
            let (u, p, q) = curve.eval(x).expect("piece lies in [-1, 1]");
            let s = (1.0 + p * p).sqrt();
            let aa = 1.0 / (u * s);
            let bb = q / (s * s * s);
            let us = u * s;
            let f = wt * (hi - lo);
            i1 += f * (aa - bb) * (aa - bb) * us;
            i2 += f * (aa * aa + bb * bb) * us;
            i3 += f * (aa + bb) * (aa + bb) * us;
        }
    }
    let ps = |x: f64| {
        let (_, p, _) = curve.eval(x).expect("endpoint lies in [-1, 1]");
        p / (1.0 + p * p).sqrt()
    };
    let boundary = ps(b) - ps(a);
    IdentityCheck {
        first: i1,
        second: i2 - 2.0 * boundary,
        third: i3 - 4.0 * boundary,
        boundary,
    }
}
