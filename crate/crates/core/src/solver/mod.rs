//! Full linearized model: coupling matrix, stability and multi-port scattering.
//!
//! Fluctuations are grouped as `v = (b, a_R, a_L, b^dag, a_R^dag, a_L^dag)` and
//! obey `dv/dt = -M v - sqrt(2 kappa) I1 - sqrt(2 kappa') I2 - sqrt(gamma_m) Im`.
//! In the Fourier domain (`e^{-i omega t}` convention)
//! `v(omega) = (-M + i omega)^{-1} (sqrt(2 kappa) I1 + ...)` and each waveguide
//! output is `f_out = f_in + sqrt(2 kappa_p) a`.

mod coupling;
mod scattering;
mod stability;

pub use coupling::{build_coupling_matrix, CouplingMatrix, MECH, MECH_DAG};
pub use scattering::{
    scattering_matrix, transmission_spectrum, Channel, PortScattering, Scatterer, CONDITION_LIMIT,
};
pub use stability::{stability_check, StabilityReport};
