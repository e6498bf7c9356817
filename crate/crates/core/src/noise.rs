//! Thermal photon noise in the right-moving output of waveguide 1.
//!
//! The mechanical bath drives `b` through `sqrt(gamma_m) xi` with
//! `<xi^dag xi> = N_th` and `<xi xi^dag> = N_th + 1`. The optomechanical
//! coupling converts these phonons into output photons concentrated at the
//! two split modes `omega_m +- G_R`, leaving the transparency window between
//! them comparatively quiet.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::LinearizedModel;
use crate::quadrature::integrate;
use crate::solver::{Channel, Scatterer};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMethod {
    /// From the mechanical column of the full scattering solution.
    Exact,
    /// Rotating-wave closed form valid near `Delta = -omega_m`.
    Approx,
}

/// Frequency band `[lo, hi]` in the rotating-frame Fourier variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    /// `[center - half_width, center + half_width]`.
    pub fn centered(center: f64, half_width: f64) -> Self {
        Self {
            lo: center - half_width,
            hi: center + half_width,
        }
    }

    /// Operation bandwidth `Delta B`: the band is `omega_m +- Delta B`.
    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseReport {
    pub band: Band,
    pub n_th: f64,
    /// Photon flux from the exact spectral density.
    pub flux_exact: f64,
    /// Photon flux from the closed-form spectral density.
    pub flux_approx: f64,
    /// Order-of-magnitude estimate `gamma_m N_th kappa Delta B / G_R^2`.
    pub power_estimate: f64,
    /// Exact noise photons in a pulse of length `1 / Delta B`.
    pub n_noise_per_pulse: f64,
    pub n_noise_per_pulse_approx: f64,
    /// `hbar omega_c` times the exact flux, when a carrier is given (rad/s).
    pub power_exact_watts: Option<f64>,
    pub power_estimate_watts: Option<f64>,
}

/// Closed-form density for a given heating rate `gamma_m N_th`.
///
/// Taking the heating rate as one number keeps the `gamma_m -> 0` limit at
/// finite `gamma_m N_th` well defined.
pub fn approx_density_from_heating(model: &LinearizedModel, heating_rate: f64, omega: f64) -> f64 {
    let g2 = model.g_r.norm_sqr();
    let kt = model.kappa_t();
    let x = (omega - model.omega_m).powi(2);
    // equals (G^2 - x)^2 + kappa_t^2 x
    let denom = g2 * g2 - 2.0 * g2 * x + (kt * kt + x) * x;
    if heating_rate == 0.0 || g2 == 0.0 {
        return 0.0;
    }
    2.0 * heating_rate * model.kappa * g2 / denom
}

fn exact_density(scatterer: &Scatterer, n_th: f64, omega: f64) -> Result<f64> {
    let s = scatterer.at(omega)?;
    let [from_xi, from_xi_dag] = s.s_mech[Channel::Wg1Right.index()];
    Ok(from_xi.norm_sqr() * n_th + from_xi_dag.norm_sqr() * (n_th + 1.0))
}

fn check_occupation(n_th: f64) -> Result<()> {
    if n_th.is_finite() && n_th >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "n_th",
            format!("must be finite and >= 0, got {n_th}"),
        ))
    }
}

/// Spectral density `<f^dag f>` of the right-moving output of waveguide 1,
/// per unit `d omega / 2 pi`.
pub fn noise_spectral_density(
    model: &LinearizedModel,
    n_th: f64,
    omega: f64,
    method: NoiseMethod,
) -> Result<f64> {
    check_occupation(n_th)?;
    let scatterer = Scatterer::new(model)?;
    match method {
        NoiseMethod::Exact => exact_density(&scatterer, n_th, omega),
        NoiseMethod::Approx => Ok(approx_density_from_heating(
            model,
            model.gamma_m * n_th,
            omega,
        )),
    }
}

fn breakpoints(model: &LinearizedModel) -> Vec<f64> {
    let g = model.g_r.norm();
    let mut pts = vec![model.omega_m, model.omega_m - g, model.omega_m + g];
    // exact resonances sit at delta = omega + Delta = 0, +-G
    let center = -model.delta;
    pts.extend([center, center - g, center + g]);
    pts
}

/// Integrates both spectral densities over `band` and derives the flux
/// estimates.
pub fn noise_power(model: &LinearizedModel, n_th: f64, band: Band) -> Result<NoiseReport> {
    check_occupation(n_th)?;
    if !(band.lo.is_finite() && band.hi.is_finite()) || band.hi < band.lo {
        return Err(Error::invalid("band", "need finite lo <= hi"));
    }
    let scatterer = Scatterer::new(model)?;
    let splits = breakpoints(model);
    let two_pi = std::f64::consts::TAU;

    let approx = integrate(
        |w| approx_density_from_heating(model, model.gamma_m * n_th, w),
        band.lo,
        band.hi,
        &splits,
        QUADRATURE_TOLERANCE,
    )?;

    // a singular point inside the band is surfaced as a quadrature failure
    let failure = std::cell::Cell::new(None);
    let exact = integrate(
        |w| match exact_density(&scatterer, n_th, w) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        },
        band.lo,
        band.hi,
        &splits,
        QUADRATURE_TOLERANCE,
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let exact = exact?;

    let flux_exact = exact.value / two_pi;
    let flux_approx = approx.value / two_pi;
    let half_width = band.half_width();
    let g2 = model.g_r.norm_sqr();
    let power_estimate = if half_width == 0.0 {
        0.0
    } else {
        model.gamma_m * n_th * model.kappa * half_width / g2
    };
    let per_pulse = |flux: f64| {
        if half_width == 0.0 {
            0.0
        } else {
            flux / half_width
        }
    };
    Ok(NoiseReport {
        band,
        n_th,
        flux_exact,
        flux_approx,
        power_estimate,
        n_noise_per_pulse: per_pulse(flux_exact),
        n_noise_per_pulse_approx: per_pulse(flux_approx),
        power_exact_watts: None,
        power_estimate_watts: None,
    })
}

impl NoiseReport {
    /// Fills the watt-valued fields from the optical carrier (rad/s).
    pub fn with_carrier(mut self, omega_c: f64) -> Self {
        self.power_exact_watts = Some(HBAR * omega_c * self.flux_exact);
        self.power_estimate_watts = Some(HBAR * omega_c * self.power_estimate);
        self
    }
}
