//! Optomechanically induced non-reciprocity in pumped microring resonators.
//!
//! A ring resonator supports two degenerate counter-propagating optical modes
//! (`a_R`, `a_L`) coupled to a mechanical breathing mode `b`. Pumping only the
//! right-circulating mode enhances the optomechanical coupling in that
//! direction alone, so right- and left-moving probes see different
//! transmission and phase.
//!
//! The crate is organized bottom-up:
//!
//! - [`model`]: device parameters, classical pump steady state and the
//!   linearized model every solver consumes.
//! - [`toy`]: closed-form single-waveguide transmission in the rotating-wave
//!   limit.
//! - [`solver`]: the 6x6 coupling matrix, its stability, and the full
//!   multi-port scattering including conjugate-field mixing.
//! - [`noise`]: thermal photon flux in the right-moving output.
//! - [`squeezing`]: closed-form phase-sensitive transmission coefficients.
//! - [`analysis`]: isolation bandwidth, parameter sweeps, regime labels.
//! - [`oracle`]: RK4 time-domain integration used to cross-check the
//!   frequency-domain solver.
//!
//! All rates share one unit (conventionally multiples of the waveguide
//! coupling `kappa`); nothing in the library assumes a particular scale.

pub mod analysis;
pub mod error;
pub mod model;
pub mod noise;
pub mod oracle;
pub mod quadrature;
pub mod solver;
pub mod squeezing;
pub mod table;
pub mod toy;

pub use error::{Error, Result};
pub use model::{DeviceParams, LinearizedModel, PumpDrive, PumpSteadyState};
pub use solver::{Channel, PortScattering};
pub use table::SweepTable;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Library version, for provenance headers in emitted files.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
