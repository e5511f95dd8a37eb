//! Linear and nonlinear time evolution.

pub mod cutoff;
pub mod etdrk4;
pub mod free;
pub mod nonlinear;
pub mod picard;

pub use cutoff::CutoffSpec;
pub use etdrk4::{evolve_nonlinear, evolve_nonlinear_observed, SolveConfig, StepRecord, Trajectory};
pub use free::{free_block, free_evolve, free_signals, ModeSignal, TimeProfile};
pub use nonlinear::nonlinearity;
pub use picard::{cumulative_integral, picard_solve, PicardOptions, PicardResult};
