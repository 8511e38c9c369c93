//! Even profile curves and the pointwise geometry of their surfaces of revolution.

mod curve;
mod geometry;
mod grid;

pub use curve::{build_profile, hermite_basis, quadratic_roots, ProfileCurve};
pub use geometry::{
    evaluate_geometry, geometry_table, mean_curvature, mirror_consistency_check, GeometrySample,
};
pub use grid::{Grid, DEFAULT_ELEMENTS, DEFAULT_QUADRATURE_ORDER};
