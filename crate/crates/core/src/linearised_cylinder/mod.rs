//! Linearisation at the Helfrich cylinder: the closed-form rate of change,
//! the boundary determinant, and the oscillation estimates for
//! `A cosh(ax) cos(ax) - B sinh(ax) sin(ax)`.

mod oscillation;
mod rc;

pub use oscillation::{
    find_sign_violation, eta_crossing, eta_function, oscillation_extrema, oscillation_h,
    peak_at_one_coefficients, phase_functions, sign_expression, sign_inequality, tanh_tan_ratio,
    OscillationReport, PhaseSample,
};
pub use rc::{
    boundary_determinant, fundamental_system, rc_bvp_residual, rc_closed_form, rc_monotonicity_verdict,
    rc_profile, RateOfChange, RcProfile, RcVerdict,
};
