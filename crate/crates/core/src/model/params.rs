use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Rates and frequencies of the ring, its waveguides and the mechanical mode.
///
/// Optical rates are field (amplitude) decay rates: the resonator leaks into
/// waveguide 1 at energy rate `2 * kappa`. The mechanical rate `gamma_m` is an
/// energy damping rate and enters the field equation of `b` as `gamma_m / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    pub omega_m: f64,
    pub kappa: f64,
    pub kappa_prime: f64,
    pub kappa_in: f64,
    pub gamma_m: f64,
    pub g0: f64,
    /// Coherent backscattering amplitude between the circulating modes.
    pub beta: C64,
    /// Bare pump detuning `omega_L - omega_c`.
    pub delta0: f64,
    /// Optical carrier, only used to turn photon fluxes into watts.
    pub omega_c: Option<f64>,
}

impl DeviceParams {
    /// Single-waveguide, lossless, undamped device with no backscattering.
    pub fn new(omega_m: f64, kappa: f64) -> Self {
        Self {
            omega_m,
            kappa,
            kappa_prime: 0.0,
            kappa_in: 0.0,
            gamma_m: 0.0,
            g0: 0.0,
            beta: C64::new(0.0, 0.0),
            delta0: -omega_m,
            omega_c: None,
        }
    }

    pub fn with_kappa_prime(mut self, kappa_prime: f64) -> Self {
        self.kappa_prime = kappa_prime;
        self
    }

    pub fn with_kappa_in(mut self, kappa_in: f64) -> Self {
        self.kappa_in = kappa_in;
        self
    }

    pub fn with_gamma_m(mut self, gamma_m: f64) -> Self {
        self.gamma_m = gamma_m;
        self
    }

    pub fn with_g0(mut self, g0: f64) -> Self {
        self.g0 = g0;
        self
    }

    pub fn with_beta(mut self, beta: impl Into<C64>) -> Self {
        self.beta = beta.into();
        self
    }

    pub fn with_delta0(mut self, delta0: f64) -> Self {
        self.delta0 = delta0;
        self
    }

    pub fn with_omega_c(mut self, omega_c: f64) -> Self {
        self.omega_c = Some(omega_c);
        self
    }

    /// Total field decay rate `kappa + kappa' + kappa_in`.
    pub fn kappa_t(&self) -> f64 {
        self.kappa + self.kappa_prime + self.kappa_in
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_m", self.omega_m),
            ("kappa", self.kappa),
            ("kappa_prime", self.kappa_prime),
            ("kappa_in", self.kappa_in),
            ("gamma_m", self.gamma_m),
            ("g0", self.g0),
            ("beta", self.beta.re),
            ("beta", self.beta.im),
            ("delta0", self.delta0),
        ];
        for (name, value) in finite {
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
            return Err(Error::invalid(
                "omega_m",
                format!("must be > 0, got {}", self.omega_m),
            ));
        }
        if self.kappa_t() <= 0.0 {
            return Err(Error::invalid(
                "kappa_t",
                "total optical decay kappa + kappa_prime + kappa_in must be > 0",
            ));
        }
        if let Some(omega_c) = self.omega_c {
            if !(omega_c.is_finite() && omega_c > 0.0) {
                return Err(Error::invalid(
                    "omega_c",
                    format!("must be > 0, got {omega_c}"),
                ));
            }
        }
        Ok(())
    }

    /// Non-fatal validity concerns of the Langevin description.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.gamma_m > self.omega_m / 10.0 {
            out.push(format!(
                "gamma_m = {} exceeds omega_m/10 = {}; the mechanical Langevin equation assumes gamma_m << omega_m",
                self.gamma_m,
                self.omega_m / 10.0
            ));
        }
        out
    }
}

/// Classical drive amplitudes entering through waveguide 1.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PumpDrive {
    pub amplitude_right: C64,
    pub amplitude_left: C64,
}

impl PumpDrive {
    pub fn right(amplitude: impl Into<C64>) -> Self {
        Self {
            amplitude_right: amplitude.into(),
            amplitude_left: C64::new(0.0, 0.0),
        }
    }

    pub fn both(right: impl Into<C64>, left: impl Into<C64>) -> Self {
        Self {
            amplitude_right: right.into(),
            amplitude_left: left.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [
            self.amplitude_right.re,
            self.amplitude_right.im,
            self.amplitude_left.re,
            self.amplitude_left.im,
        ];
        if parts.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::invalid("pump", "drive amplitudes must be finite"))
        }
    }
}
