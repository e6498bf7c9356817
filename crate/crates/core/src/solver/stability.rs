use serde::{Deserialize, Serialize};

use super::coupling::CouplingMatrix;
use crate::C64;

/// Eigenvalue tolerance relative to the largest matrix entry.
const MARGINAL_TOLERANCE: f64 = 1e-10;

/// Spectrum of `M`. Fluctuations evolve as `dv/dt = -M v`, so they decay iff
/// every eigenvalue has a positive real part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub eigenvalues: Vec<C64>,
    /// `min Re(lambda)`; the slowest decay rate (negative: growth rate).
    pub margin: f64,
    /// Strictly stable: `margin` exceeds the rounding tolerance.
    pub stable: bool,
    /// Some eigenvalue sits on the imaginary axis within tolerance.
    pub marginal: bool,
}

impl StabilityReport {
    /// Neither strictly stable nor marginal.
    pub fn is_unstable(&self) -> bool {
        !self.stable && !self.marginal
    }
}

pub fn stability_check(m: &CouplingMatrix) -> StabilityReport {
    let scale = m.m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = MARGINAL_TOLERANCE * scale;
    let mut eigenvalues: Vec<C64> = match m.m.schur().eigenvalues() {
        Some(ev) => ev.iter().copied().collect(),
        // Schur iteration failing on a 6x6 is not expected; report as unstable
        None => vec![C64::new(f64::NAN, f64::NAN); 6],
    };
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let margin = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, |acc, x| {
            if x.is_nan() {
                f64::NAN
            } else {
                acc.min(x)
            }
        });
    let stable = margin > tol;
    let marginal = margin.abs() <= tol;
    StabilityReport {
        eigenvalues,
        margin,
        stable,
        marginal,
    }
}
