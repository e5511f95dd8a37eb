//! Discrete fields on `T x R^d` and `R_t x T x R^d`, their transforms and norms.

pub mod grid;
pub mod io;
pub mod norms;
pub mod random;
pub mod spacetime;
pub mod spectral;
pub mod transform;

pub use grid::{make_grid, GridParams, GridSpec};
pub use norms::{bourgain_norm, mixed_norm, Flavor, ModeNormAccumulator, NormSpec};
pub use random::{random_field, BandSpec};
pub use spacetime::{SpaceTimeField, SpaceTimeMode, TauSegment, TimeSignal};
pub use spectral::{project_mean_zero, sobolev_norm, Mode, SpectralField};
pub use transform::{to_physical, to_physical_dims, to_spectral, transform, PhysicalField, TransformInput};
