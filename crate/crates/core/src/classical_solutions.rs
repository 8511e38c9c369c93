//! Catenaries, the Goldschmidt solution and the special constants of the
//! catenoid family.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::UnitRule;
use crate::roots::bisect_full;

/// Defining-equation residuals of the computed constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantResiduals {
    /// `c0 - tanh(1/c0)`
    pub c0: f64,
    /// `2/cm - 1 - exp(-2/cm)`
    pub cm: f64,
    /// `tan(ac) - tanh(ac)`
    pub ac: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsTable {
    pub c0: f64,
    pub alpha0: f64,
    pub cm: f64,
    pub alpham: f64,
    pub ac: f64,
    pub alphacrit: f64,
    pub residuals: ConstantResiduals,
}

pub fn compute_constants() -> ConstantsTable {
    let c0 = bisect_full(|c| c - (1.0 / c).tanh(), 0.5, 1.5).expect("c0 bracket");
    let alpha0 = c0 * (1.0 / c0).cosh();
    let t = bisect_full(|t| t - 1.0 - (-t).exp(), 1.0, 2.0).expect("cm bracket");
    let cm = 2.0 / t;
    let alpham = cm * (1.0 / cm).cosh();
    // tan x = tanh x, multiplied through by cos x cosh x to remove the pole
    let ac = bisect_full(|x| x.sin() * x.cosh() - x.cos() * x.sinh(), PI, 1.5 * PI)
        .expect("ac bracket");
    let alphacrit = 1.0 / (ac * 2f64.sqrt());
    ConstantsTable {
        c0,
        alpha0,
        cm,
        alpham,
        ac,
        alphacrit,
        residuals: ConstantResiduals {
            c0: c0 - (1.0 / c0).tanh(),
            cm: 2.0 / cm - 1.0 - (-2.0 / cm).exp(),
            ac: ac.tan() - ac.tanh(),
        },
    }
}

impl ConstantsTable {
    /// Process-wide table, computed on first use.
    pub fn shared() -> &'static ConstantsTable {
        static TABLE: OnceLock<ConstantsTable> = OnceLock::new();
        TABLE.get_or_init(compute_constants)
    }
}

/// `alpha(c) = c cosh(1/c)`, the boundary value of the catenary `w_c`.
pub fn alpha_of_c(c: f64) -> f64 {
    c * (1.0 / c).cosh()
}

pub fn alpha_prime(c: f64) -> f64 {
    (1.0 / c).cosh() - (1.0 / c).sinh() / c
}

pub fn alpha_second(c: f64) -> f64 {
    (1.0 / c).cosh() / (c * c * c)
}

/// `ln(c cosh(1/c))` without overflow for small `c`.
fn log_alpha_of_c(c: f64) -> f64 {
    let y = 1.0 / c;
    c.ln() + y + (-2.0 * y).exp().ln_1p() - std::f64::consts::LN_2
}

/// Catenary `w_c(x) = c cosh(x/c)` and its slope.
pub fn catenary(c: f64, x: f64) -> (f64, f64) {
    (c * (x / c).cosh(), (x / c).sinh())
}

/// Area of the catenoid generated by `w_c` over `[-1, 1]`.
pub fn catenary_area(c: f64) -> f64 {
    2.0 * PI * c + PI * c * c * (2.0 / c).sinh()
}

pub fn goldschmidt_area(alpha: f64) -> f64 {
    2.0 * PI * alpha * alpha
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatenaryBranch {
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
    pub area1: f64,
    pub area2: f64,
    pub eps_hat: f64,
}

/// Both solutions of `c cosh(1/c) = alpha`.
pub fn solve_catenary_branches(alpha: f64) -> Result<CatenaryBranch> {
    let k = ConstantsTable::shared();
    if !(alpha >= k.alpha0) {
        return Err(Error::NoSolution { alpha, alpha0: k.alpha0 });
    }
    let (c1, c2) = if alpha == k.alpha0 {
        (k.c0, k.c0)
    } else {
        let c1 = bisect_full(|c| alpha_of_c(c) - alpha, k.c0, 2.0 * alpha)?;
        let target = alpha.ln();
        let mut lo = 0.1;
        while log_alpha_of_c(lo) - target <= 0.0 {
            lo *= 0.1;
            if lo < 1e-300 {
                return Err(Error::NoSolution { alpha, alpha0: k.alpha0 });
            }
        }
        let c2 = bisect_full(|c| log_alpha_of_c(c) - target, lo, k.c0)?;
        (c1, c2)
    };
    Ok(CatenaryBranch {
        alpha,
        c1,
        c2,
        area1: catenary_area(c1),
        area2: catenary_area(c2),
        eps_hat: 1.0 / (4.0 * c1 * c1),
    })
}

/// `(catenary area - Goldschmidt area) / (2 pi)` along the family `alpha(c)`.
pub fn g_function(c: f64) -> f64 {
    c - 0.5 * c * c - 0.5 * c * c * (-2.0 / c).exp()
}

pub fn g_prime(c: f64) -> f64 {
    let e = (-2.0 / c).exp();
    1.0 - c - c * e - e
}

pub fn g_second(c: f64) -> f64 {
    let y = 1.0 / c;
    -1.0 - (-2.0 * y).exp() * (1.0 + 2.0 * y + 2.0 * y * y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AreaMinimiser {
    Catenary,
    Goldschmidt,
    Both,
}

pub fn classify_area_minimiser(alpha: f64) -> AreaMinimiser {
    let am = ConstantsTable::shared().alpham;
    if (alpha - am).abs() <= 1e-12 * am {
        AreaMinimiser::Both
    } else if alpha > am {
        AreaMinimiser::Catenary
    } else {
        AreaMinimiser::Goldschmidt
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub c: f64,
    /// `alpha(c0 - c) - alpha(c0 + c)`
    pub alpha_gap: f64,
    /// `g(c0 - c) - g(c0 + c)`
    pub g_gap: f64,
    pub alpha_holds: bool,
    pub g_holds: bool,
}

/// `f(c0 - c) - f(c0 + c)` for a function with `f'(c0) = 0`, written as
/// `int_0^c (c - t) (f''(c0 - t) - f''(c0 + t)) dt` so that small gaps keep
/// their relative accuracy.
fn symmetric_gap(c0: f64, c: f64, second: impl Fn(f64) -> f64) -> f64 {
    let rule = UnitRule::new(24);
    rule.integrate_composite(0.0, c, 4, |t| (c - t) * (second(c0 - t) - second(c0 + t)))
}

pub fn catenary_convexity_checks(c: f64) -> Result<ConvexityReport> {
    let c0 = ConstantsTable::shared().c0;
    if !(c > 0.0 && c < c0) {
        return Err(Error::InvalidInput(format!("c must lie in (0, c0), got {c}")));
    }
    let alpha_gap = symmetric_gap(c0, c, alpha_second);
    let g_gap = symmetric_gap(c0, c, g_second);
    Ok(ConvexityReport {
        c,
        alpha_gap,
        g_gap,
        alpha_holds: alpha_gap > 0.0,
        g_holds: g_gap > 0.0,
    })
}

/// `v_alpha = w_{c1(alpha)}` together with its parameter.
pub fn v_alpha(alpha: f64) -> Result<(f64, impl Fn(f64) -> (f64, f64))> {
    let c = solve_catenary_branches(alpha)?.c1;
    Ok((c, move |x: f64| catenary(c, x)))
}
