use std::f64::consts::PI;

use serde::Serialize;

use super::functional::{helfrich, EnergyReport};
use crate::profile_geometry::ProfileCurve;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

impl BoundCheck {
    fn at_most(lhs: f64, rhs: f64, slack: f64) -> Self {
        Self { lhs, rhs, satisfied: lhs <= rhs + slack }
    }

    fn at_least(lhs: f64, rhs: f64, slack: f64) -> Self {
        Self { lhs, rhs, satisfied: lhs >= rhs - slack }
    }
}

/// Energy bounds for a profile. Entries are `None` when the hypotheses of
/// the corresponding estimate do not hold for the curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub energy: EnergyReport,
    /// `A W >= 4 pi^2`; needs vanishing boundary slopes.
    pub product: Option<BoundCheck>,
    /// `max |u'| <= W / sqrt(16 pi^2 - W^2)`; needs `W < 4 pi` and vanishing boundary slopes.
    pub gradient: Option<BoundCheck>,
    /// `min u >= alpha exp(-M sqrt(1 + M^2) W / pi)` with `M = max |u'|`.
    pub lower_envelope: BoundCheck,
    /// `max u <= alpha + M`.
    pub upper_envelope: BoundCheck,
    /// `H_eps >= 4 pi sqrt(eps)`; needs vanishing boundary slopes.
    pub helfrich_floor: Option<BoundCheck>,
    /// `W <= (H_eps + sqrt(H_eps^2 - 16 pi^2 eps)) / 2`; needs vanishing boundary slopes.
    pub willmore_ceiling: Option<BoundCheck>,
}

impl BoundReport {
    pub fn all_satisfied(&self) -> bool {
        [
            self.product,
            self.gradient,
            Some(self.lower_envelope),
            Some(self.upper_envelope),
            self.helfrich_floor,
            self.willmore_ceiling,
        ]
        .iter()
        .flatten()
        .all(|b| b.satisfied)
    }
}

pub fn bound_suite(curve: &ProfileCurve, epsilon: f64) -> BoundReport {
    let energy = helfrich(curve, epsilon);
    let (a, w, hf) = (energy.area, energy.willmore, energy.helfrich);
    let n = curve.derivatives().len();
    let clamped = curve.derivatives()[0] == 0.0 && curve.derivatives()[n - 1] == 0.0;
    let m = curve.max_abs_slope();
    let (u_min, u_max) = curve.value_range();
    let alpha = curve.alpha();
    let four_pi = 4.0 * PI;

    let product = clamped.then(|| BoundCheck::at_least(a * w, 4.0 * PI * PI, 1e-9 * 4.0 * PI * PI));
    let gradient = (clamped && w < four_pi)
        .then(|| BoundCheck::at_most(m, w / (four_pi * four_pi - w * w).sqrt(), 1e-9));
    let floor = alpha * (-m * (1.0 + m * m).sqrt() * w / PI).exp();
    let lower_envelope = BoundCheck::at_least(u_min, floor, 1e-12 * alpha);
    let upper_envelope = BoundCheck::at_most(u_max, alpha + m, 1e-12 * alpha);
    let helfrich_floor =
        clamped.then(|| BoundCheck::at_least(hf, four_pi * epsilon.sqrt(), 1e-9 * hf.abs()));
    let disc = hf * hf - 16.0 * PI * PI * epsilon;
    let willmore_ceiling = (clamped && disc >= 0.0)
        .then(|| BoundCheck::at_most(w, 0.5 * (hf + disc.sqrt()), 1e-9 * hf.abs()));
    BoundReport {
        energy,
        product,
        gradient,
        lower_envelope,
        upper_envelope,
        helfrich_floor,
        willmore_ceiling,
    }
}
