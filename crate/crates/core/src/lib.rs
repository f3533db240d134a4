//! Gap filling for 2-D gridded data by conditional Monte Carlo simulation
//! of a modified planar rotator (MPR) spin model.
//!
//! Sample values are mapped linearly onto spin angles, missing sites are
//! relaxed by checkerboard Metropolis dynamics at a temperature inferred
//! from the sample energy, and predictions are averages of back-transformed
//! equilibrium states. Spatially-varying-temperature variants (block and
//! site specific) adapt to non-stationary data, and an inverse-distance
//! weighting baseline plus a validation harness support method comparison.

pub mod calibration;
pub mod error;
pub mod grid;
pub mod idw;
pub mod model;
pub mod pipeline;
pub mod raster;
pub mod reduce;
pub mod rng;
pub mod sim;
pub mod temperature;
pub mod validate;

pub use error::{Error, Result};
pub use grid::{
    from_angles, to_angles, AngleField, BlockDecomposition, CellKind, Color, GridField, Lattice,
    TransformParams,
};
pub use model::{
    full_bond_count, grid_specific_energy, sample_specific_energy, BondEnergyStats, MprParams,
};
