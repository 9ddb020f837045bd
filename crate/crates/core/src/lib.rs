//! Classification, exact per-frequency simulation and energy-estimate checks
//! for constant-coefficient higher-order Schrödinger-type equations on the
//! circle.

pub mod checks;
pub mod classify;
pub mod commands;
pub mod config;
pub mod coefficients;
pub mod energy;
pub mod error;
pub mod estimates;
pub mod mode;
pub mod laurent;
pub mod spec;
pub mod state;

pub type C64 = num_complex::Complex64;

pub use classify::{classify, Classification, Kind, Sign, Smoothing};
pub use coefficients::CoefficientTable;
pub use error::{Error, Result};
pub use mode::{evolve_mode, mat_exp_2x2, ModePair};
pub use spec::EquationSpec;
