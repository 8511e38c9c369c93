use serde::Serialize;

use crate::classical_solutions::{solve_catenary_branches, ConstantsTable};

/// Which existence criteria cover a parameter pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeLabel {
    pub alpha: f64,
    pub epsilon: f64,
    pub via_cylinder: bool,
    pub via_comparison: bool,
    pub via_gluing: bool,
    pub on_cylinder_curve: bool,
}

/// Largest weight covered by the comparison-surface bound.
pub fn comparison_threshold(alpha: f64) -> f64 {
    (1.0 - (0.5 / alpha).tanh())
        / ((1.0 + alpha * alpha).sqrt() + 0.25 * alpha + 0.25 * alpha * alpha * (1.0 / alpha).sinh()
            - 0.25)
}

/// Helfrich-cylinder weight `1 / (4 alpha^2)`.
pub fn cylinder_weight(alpha: f64) -> f64 {
    0.25 / (alpha * alpha)
}

pub fn classify_regime(alpha: f64, epsilon: f64, constants: &ConstantsTable) -> RegimeLabel {
    let via_cylinder = alpha > 0.25 && epsilon >= 0.0 && epsilon < 1.0 / alpha;
    let via_comparison = alpha > 0.0 && epsilon >= 0.0 && epsilon <= comparison_threshold(alpha);
    let via_gluing = alpha >= constants.alpham
        && solve_catenary_branches(alpha).is_ok_and(|b| epsilon >= b.eps_hat);
    let eps_alpha = cylinder_weight(alpha);
    let on_cylinder_curve = (epsilon - eps_alpha).abs() <= 1e-12 * eps_alpha;
    RegimeLabel {
        alpha,
        epsilon,
        via_cylinder,
        via_comparison,
        via_gluing,
        on_cylinder_curve,
    }
}

pub const REGIME_CSV_HEADER: &str =
    "alpha,epsilon,via_cylinder,via_comparison,via_gluing,on_cylinder_curve";
