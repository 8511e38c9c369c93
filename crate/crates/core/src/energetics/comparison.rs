use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile_geometry::{Grid, ProfileCurve};
use crate::roots::bisect;

/// Sphere arc on `|x| < x0` glued to the catenary `alpha cosh((|x| - 1)/alpha)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonSurface {
    pub alpha: f64,
    pub x0: f64,
    pub r: f64,
    pub profile: ProfileCurve,
}

/// `x + alpha cosh((x-1)/alpha) sinh((x-1)/alpha)`; its zero in `(1/2, 1)` is the gluing point.
pub fn gluing_function(alpha: f64, x: f64) -> f64 {
    x + 0.5 * alpha * (2.0 * (x - 1.0) / alpha).sinh()
}

/// Gluing point and sphere radius for boundary value `alpha`.
pub fn comparison_point(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    let x0 = bisect(|x| gluing_function(alpha, x), 0.5, 1.0, 1e-15)?;
    let ch = ((x0 - 1.0) / alpha).cosh();
    let r = (x0 * x0 + alpha * alpha * ch * ch).sqrt();
    Ok((x0, r))
}

/// Exact profile value and slope at `x` in `[0, 1]`.
pub fn comparison_profile(alpha: f64, x0: f64, r: f64, x: f64) -> (f64, f64) {
    if x < x0 {
        let v = (r * r - x * x).sqrt();
        (v, -x / v)
    } else {
        let z = (x - 1.0) / alpha;
        (alpha * z.cosh(), z.sinh())
    }
}

/// Builds the comparison surface; `x0` is inserted into the grid as a node so
/// the piecewise profile is represented without smearing its curvature jump.
pub fn build_comparison_surface(alpha: f64, grid: &Grid) -> Result<ComparisonSurface> {
    let (x0, r) = comparison_point(alpha)?;
    let grid = grid.with_nodes(&[x0], 1e-12)?;
    let snapped = grid.nodes()[grid.node_index(x0, 1e-12).expect("x0 inserted")];
    let profile = ProfileCurve::sample_admissible(alpha, grid, |x| {
        if x == snapped {
            comparison_profile(alpha, x0, r, x0)
        } else {
            comparison_profile(alpha, x0, r, x)
        }
    })?;
    Ok(ComparisonSurface { alpha, x0, r, profile })
}

impl ComparisonSurface {
    /// Slope mismatch between the two arcs at `x0`.
    pub fn gluing_defect(&self) -> f64 {
        let sphere = -self.x0 / (self.r * self.r - self.x0 * self.x0).sqrt();
        let cat = ((self.x0 - 1.0) / self.alpha).sinh();
        (sphere - cat).abs()
    }

    /// Exact Willmore energy `4 pi x0 / r` (the catenary arcs are minimal).
    pub fn willmore_exact(&self) -> f64 {
        4.0 * PI * self.x0 / self.r
    }

    /// Exact area: spherical zone plus two catenoidal collars.
    pub fn area_exact(&self) -> f64 {
        let a = self.alpha;
        let collar = 2.0 * PI * a * (1.0 - self.x0 + 0.5 * a * (2.0 * (1.0 - self.x0) / a).sinh());
        4.0 * PI * self.x0 * self.r + collar
    }
}

/// Closed-form upper bound on the comparison surface's Helfrich energy.
pub fn comparison_bound(alpha: f64, epsilon: f64) -> f64 {
    4.0 * PI * (0.5 / alpha).tanh()
        + epsilon
            * (4.0 * PI * (1.0 + alpha * alpha).sqrt()
                + PI * alpha
                + PI * alpha * alpha * (1.0 / alpha).sinh())
}

/// Energy of the cylinder `u = alpha`.
pub fn cylinder_energy(alpha: f64, epsilon: f64) -> f64 {
    PI / alpha + 4.0 * PI * alpha * epsilon
}
