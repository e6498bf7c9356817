use serde::{Deserialize, Serialize};

use super::params::{DeviceParams, PumpDrive};
use crate::error::{Error, Result};
use crate::C64;

/// Relative tolerance of the bare-detuning fixed point.
pub const DETUNING_TOLERANCE: f64 = 1e-12;
pub const MAX_DETUNING_ITERATIONS: usize = 200;

const I: C64 = C64::new(0.0, 1.0);

/// Classical intra-resonator state around which the dynamics is linearized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpSteadyState {
    pub alpha_r: C64,
    pub alpha_l: C64,
    /// Static mechanical displacement `<b> = -g0 (|alpha_R|^2 + |alpha_L|^2) / omega_m`.
    pub b_static: f64,
    /// Detuning with the static optomechanical shift absorbed.
    pub delta: f64,
    /// Bare detuning consistent with `delta` and the photon number.
    pub delta0: f64,
}

impl PumpSteadyState {
    pub fn photon_number(&self) -> f64 {
        self.alpha_r.norm_sqr() + self.alpha_l.norm_sqr()
    }
}

/// Linearized fluctuation model: enhanced couplings, detuning and rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearizedModel {
    pub g_r: C64,
    pub g_l: C64,
    pub delta: f64,
    pub beta: C64,
    pub omega_m: f64,
    pub kappa: f64,
    pub kappa_prime: f64,
    pub kappa_in: f64,
    pub gamma_m: f64,
}

impl LinearizedModel {
    /// Builds a model from explicitly chosen couplings and shifted detuning,
    /// taking rates and `beta` from `params`.
    pub fn from_couplings(
        params: &DeviceParams,
        g_r: impl Into<C64>,
        g_l: impl Into<C64>,
        delta: f64,
    ) -> Self {
        Self {
            g_r: g_r.into(),
            g_l: g_l.into(),
            delta,
            beta: params.beta,
            omega_m: params.omega_m,
            kappa: params.kappa,
            kappa_prime: params.kappa_prime,
            kappa_in: params.kappa_in,
            gamma_m: params.gamma_m,
        }
    }

    /// Single-waveguide device pumped on the red sideband (`Delta = -omega_m`)
    /// with only the right-circulating coupling enhanced.
    pub fn red_sideband(omega_m: f64, g_r: f64, kappa: f64, kappa_in: f64, gamma_m: f64) -> Self {
        let params = DeviceParams::new(omega_m, kappa)
            .with_kappa_in(kappa_in)
            .with_gamma_m(gamma_m);
        Self::from_couplings(&params, g_r, 0.0, -omega_m)
    }

    pub fn with_beta(mut self, beta: impl Into<C64>) -> Self {
        self.beta = beta.into();
        self
    }

    pub fn with_kappa_prime(mut self, kappa_prime: f64) -> Self {
        self.kappa_prime = kappa_prime;
        self
    }

    pub fn with_g_l(mut self, g_l: impl Into<C64>) -> Self {
        self.g_l = g_l.into();
        self
    }

    pub fn with_g_r(mut self, g_r: impl Into<C64>) -> Self {
        self.g_r = g_r.into();
        self
    }

    pub fn kappa_t(&self) -> f64 {
        self.kappa + self.kappa_prime + self.kappa_in
    }

    pub fn validate(&self) -> Result<()> {
        let values = [
            ("g_r", self.g_r.re),
            ("g_r", self.g_r.im),
            ("g_l", self.g_l.re),
            ("g_l", self.g_l.im),
            ("delta", self.delta),
            ("beta", self.beta.re),
            ("beta", self.beta.im),
            ("omega_m", self.omega_m),
            ("kappa", self.kappa),
            ("kappa_prime", self.kappa_prime),
            ("kappa_in", self.kappa_in),
            ("gamma_m", self.gamma_m),
        ];
        for (name, value) in values {
            if !value.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {value}")));
            }
        }
        for (name, value) in [
            ("kappa", self.kappa),
            ("kappa_prime", self.kappa_prime),
            ("kappa_in", self.kappa_in),
            ("gamma_m", self.gamma_m),
        ] {
            if value < 0.0 {
                return Err(Error::invalid(name, format!("must be >= 0, got {value}")));
            }
        }
        if self.omega_m <= 0.0 {
            return Err(Error::invalid("omega_m", "must be > 0"));
        }
        if self.kappa_t() <= 0.0 {
            return Err(Error::invalid("kappa_t", "total optical decay must be > 0"));
        }
        Ok(())
    }
}

/// Solves the two linear steady-state field equations at fixed shifted detuning.
fn fields_at(params: &DeviceParams, drive: &PumpDrive, delta: f64) -> Result<(C64, C64)> {
    let d = C64::new(-params.kappa_t(), delta);
    let beta = params.beta;
    let det = d * d + beta.norm_sqr();
    // det = 0 needs kappa_t = 0 for real delta; guard the rounding neighbourhood too
    let scale = d.norm_sqr() + beta.norm_sqr();
    if det == C64::new(0.0, 0.0) || det.norm() <= 1e-14 * scale {
        return Err(Error::SingularPump);
    }
    let two_kappa = 2.0 * params.kappa;
    let e_r = drive.amplitude_right;
    let e_l = drive.amplitude_left;
    let alpha_r = two_kappa * (d * e_r + I * beta.conj() * e_l) / det;
    let alpha_l = two_kappa * (d * e_l + I * beta * e_r) / det;
    Ok((alpha_r, alpha_l))
}

fn assemble(params: &DeviceParams, alpha_r: C64, alpha_l: C64, delta: f64) -> PumpSteadyState {
    let n = alpha_r.norm_sqr() + alpha_l.norm_sqr();
    PumpSteadyState {
        alpha_r,
        alpha_l,
        b_static: -params.g0 * n / params.omega_m,
        delta,
        delta0: delta - 2.0 * params.g0 * params.g0 * n / params.omega_m,
    }
}

/// Pump steady state for a given shifted detuning `delta`.
///
/// The bare detuning reported in the result is the one that would produce
/// `delta` at this photon number.
pub fn steady_state_pump_shifted(
    params: &DeviceParams,
    drive: &PumpDrive,
    delta: f64,
) -> Result<PumpSteadyState> {
    params.validate()?;
    drive.validate()?;
    if !delta.is_finite() {
        return Err(Error::invalid("delta", "must be finite"));
    }
    let (alpha_r, alpha_l) = fields_at(params, drive, delta)?;
    Ok(assemble(params, alpha_r, alpha_l, delta))
}

/// Pump steady state starting from the bare detuning `params.delta0`.
///
/// The static optomechanical frequency shift depends on the photon number,
/// which in turn depends on the shifted detuning; the pair is found by
/// fixed-point iteration `Delta <- Delta0 + 2 g0^2 n(Delta) / omega_m`.
pub fn steady_state_pump(params: &DeviceParams, drive: &PumpDrive) -> Result<PumpSteadyState> {
    params.validate()?;
    drive.validate()?;
    let delta = self_consistent_detuning(params, |delta| {
        let (alpha_r, alpha_l) = fields_at(params, drive, delta)?;
        Ok(alpha_r.norm_sqr() + alpha_l.norm_sqr())
    })?;
    let (alpha_r, alpha_l) = fields_at(params, drive, delta)?;
    let mut state = assemble(params, alpha_r, alpha_l, delta);
    state.delta0 = params.delta0;
    Ok(state)
}

fn self_consistent_detuning(
    params: &DeviceParams,
    photon_number: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    let shift = 2.0 * params.g0 * params.g0 / params.omega_m;
    let scale = params.kappa_t();
    let mut delta = params.delta0;
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_DETUNING_ITERATIONS {
        let next = params.delta0 + shift * photon_number(delta)?;
        if !next.is_finite() {
            break;
        }
        residual = (next - delta).abs() / next.abs().max(scale);
        delta = next;
        if residual <= DETUNING_TOLERANCE {
            return Ok(delta);
        }
    }
    Err(Error::PumpNotConverged {
        iterations: MAX_DETUNING_ITERATIONS,
        residual,
    })
}

/// Enhanced couplings `G_i = g0 * alpha_i` around the pump steady state.
pub fn linearize(params: &DeviceParams, pump: &PumpSteadyState) -> LinearizedModel {
    LinearizedModel::from_couplings(
        params,
        params.g0 * pump.alpha_r,
        params.g0 * pump.alpha_l,
        pump.delta,
    )
}

/// Left-going pump amplitude that empties the left-circulating mode at
/// shifted detuning `delta`: `E' = -i beta E / (i Delta - kappa_t)`.
pub fn cancellation_drive_shifted(params: &DeviceParams, delta: f64, drive_right: C64) -> C64 {
    let d = C64::new(-params.kappa_t(), delta);
    -I * params.beta * drive_right / d
}

/// Cancellation drive for the bare detuning `params.delta0`.
///
/// With the left mode emptied, `alpha_R = 2 kappa E / (i Delta - kappa_t)`, so
/// the self-consistent shift only involves the right-circulating photons.
pub fn cancellation_drive(params: &DeviceParams, drive_right: C64) -> Result<C64> {
    params.validate()?;
    let delta = self_consistent_detuning(params, |delta| {
        let d = C64::new(-params.kappa_t(), delta);
        Ok((2.0 * params.kappa * drive_right / d).norm_sqr())
    })?;
    Ok(cancellation_drive_shifted(params, delta, drive_right))
}
