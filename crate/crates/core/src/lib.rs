pub mod error;
pub mod estimates;
pub mod evolution;
pub mod fields;
pub mod illposed;
pub mod symbols;

pub use error::{Error, Result, Violation};
pub use fields::{GridParams, GridSpec, NormSpec, SpaceTimeField, SpectralField};
pub use symbols::{DispersionParams, FrequencyPoint, ModulationPoint, ResonanceRecord};
