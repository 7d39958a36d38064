pub mod condensate;
pub mod contour;
pub mod crystal;
pub mod distribution;
pub mod error;
pub mod fluid;
pub mod fourier;
pub mod grid;
pub mod cli;
pub mod hierarchy;
pub mod quadrature;
pub mod types;
pub mod wigner;

pub use distribution::{DeltaPeak, DeltaPeakMeasure, GriddedDistribution};
pub use error::{Error, Result};
pub use grid::{Grid, GridKind, MomentumGrid, PositionGrid};
pub use types::{statistics_sign, LatticeIndex, PhysicalParams, Statistics, Vec3};
