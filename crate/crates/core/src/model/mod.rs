//! Physical parameters, classical pump steady state and linearization.
//!
//! The pumped ring is described by the mode-coupling optomechanical
//! Hamiltonian. A strong classical drive sets intra-resonator amplitudes
//! `alpha_R`, `alpha_L`; fluctuations around them obey linear equations with
//! enhanced couplings `G_i = g0 * alpha_i`, captured by [`LinearizedModel`].

mod params;
mod pump;

pub use params::{DeviceParams, PumpDrive};
pub use pump::{
    cancellation_drive, cancellation_drive_shifted, linearize, steady_state_pump,
    steady_state_pump_shifted, LinearizedModel, PumpSteadyState, DETUNING_TOLERANCE,
    MAX_DETUNING_ITERATIONS,
};

/// Converts an ordinary frequency in Hz to an angular rate in rad/s.
pub fn hz_to_angular(hz: f64) -> f64 {
    std::f64::consts::TAU * hz
}
