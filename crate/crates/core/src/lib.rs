//! Minimisers of the Helfrich energy `W + eps A` for surfaces of revolution
//! generated by even profiles `u > 0` on `[-1, 1]` with `u(+-1) = alpha`,
//! `u'(+-1) = 0`.

pub mod classical_solutions;
pub mod energetics;
pub mod error;
pub mod linearised_cylinder;
pub mod minimiser;
pub mod profile_geometry;
pub mod quadrature;
pub mod roots;

pub use classical_solutions::{CatenaryBranch, ConstantsTable};
pub use energetics::{EnergyReport, RegimeLabel};
pub use error::{Error, Result};
pub use minimiser::{SeedProfile, SolveResult, SolverConfig};
pub use profile_geometry::{GeometrySample, Grid, ProfileCurve};
