//! Phase-sensitive transmission of the single-waveguide device.
//!
//! Off-resonant `a^dag b^dag + a b` terms mix an input field with its
//! conjugate. For `beta = 0`, `G_L = 0`, `kappa' = 0` and `Delta = -omega_m`
//! the right-moving output obeys
//! `f_out(w) = alpha(w) f_in(w) + eta(w) f_in^dag(-w)` with closed forms below.
//! Mechanical damping is absent from these expressions (`gamma_m = 0`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Rates entering the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingModel {
    pub kappa: f64,
    pub kappa_in: f64,
    pub g: C64,
    pub omega_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSensitivePair {
    /// Phase-insensitive amplitude `f_in(w) -> f_out(w)`.
    pub alpha: C64,
    /// Phase-sensitive amplitude `f_in^dag(-w) -> f_out(w)`.
    pub eta: C64,
    /// Rotating-frame Fourier frequency.
    pub omega: f64,
    /// Probe detuning from the optical resonance, `omega - omega_m`.
    pub delta: f64,
}

impl SqueezingModel {
    pub fn new(kappa: f64, kappa_in: f64, g: impl Into<C64>, omega_m: f64) -> Self {
        Self {
            kappa,
            kappa_in,
            g: g.into(),
            omega_m,
        }
    }

    /// Coefficients at Fourier frequency `omega`.
    pub fn coefficients(&self, omega: f64) -> Result<PhaseSensitivePair> {
        let SqueezingModel {
            kappa,
            kappa_in,
            g,
            omega_m,
        } = *self;
        let i = C64::new(0.0, 1.0);
        let g2 = g.norm_sqr();
        let w = C64::from(omega);
        let wm = C64::from(omega_m);
        let split = omega * omega - omega_m * omega_m;

        let denom = 4.0 * g2 * omega_m * omega_m
            + split * ((kappa + kappa_in - i * w).powi(2) + omega_m * omega_m);
        if denom.norm() == 0.0 || !denom.norm().is_finite() {
            return Err(Error::DegenerateDenominator { omega });
        }
        let alpha_num = 4.0 * g2 * omega_m * (wm + i * kappa)
            - split * ((w + i * kappa_in).powi(2) - (wm + i * kappa).powi(2));
        let eta_num = 4.0 * i * g * g * kappa * omega_m;
        Ok(PhaseSensitivePair {
            alpha: alpha_num / denom,
            eta: eta_num / denom,
            omega,
            delta: omega - omega_m,
        })
    }

    /// Coefficients at probe detuning `delta = omega - omega_m`.
    pub fn at_detuning(&self, delta: f64) -> Result<PhaseSensitivePair> {
        self.coefficients(delta + self.omega_m)
    }
}

/// Size of the phase-sensitive term relative to the ordinary transmission,
/// `|eta / alpha|`.
pub fn squeezing_ratio(pair: &PhaseSensitivePair) -> Result<f64> {
    if pair.alpha.norm() == 0.0 {
        return Err(Error::invalid(
            "alpha",
            format!("vanishes at omega = {}; ratio undefined", pair.omega),
        ));
    }
    Ok((pair.eta / pair.alpha).norm())
}
