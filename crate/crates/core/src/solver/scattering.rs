use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix6;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coupling::{build_coupling_matrix, CouplingMatrix, MECH, MECH_DAG};
use super::stability::{stability_check, StabilityReport};
use crate::error::{Error, Result};
use crate::model::LinearizedModel;
use crate::table::SweepTable;
use crate::C64;

/// Points whose `(-M + i omega)` has a 1-norm condition number above this are
/// reported as singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Directed optical channel of the four-port device.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    Wg1Right,
    Wg1Left,
    Wg2Right,
    Wg2Left,
}

impl Channel {
    pub const ALL: [Channel; 4] = [
        Channel::Wg1Right,
        Channel::Wg1Left,
        Channel::Wg2Right,
        Channel::Wg2Left,
    ];

    pub fn index(self) -> usize {
        match self {
            Channel::Wg1Right => 0,
            Channel::Wg1Left => 1,
            Channel::Wg2Right => 2,
            Channel::Wg2Left => 3,
        }
    }

    /// Waveguide number, 1 or 2.
    pub fn waveguide(self) -> u8 {
        match self {
            Channel::Wg1Right | Channel::Wg1Left => 1,
            Channel::Wg2Right | Channel::Wg2Left => 2,
        }
    }

    /// Position of the matching circulating mode in the fluctuation vector.
    pub fn mode_slot(self) -> usize {
        match self {
            Channel::Wg1Right | Channel::Wg2Right => 1,
            Channel::Wg1Left | Channel::Wg2Left => 2,
        }
    }

    /// Field coupling amplitude `sqrt(2 kappa_p)` of this channel's waveguide.
    pub fn coupling(self, model: &LinearizedModel) -> f64 {
        match self.waveguide() {
            1 => (2.0 * model.kappa).sqrt(),
            _ => (2.0 * model.kappa_prime).sqrt(),
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Channel::Wg1Right => "wg1-R",
            Channel::Wg1Left => "wg1-L",
            Channel::Wg2Right => "wg2-R",
            Channel::Wg2Left => "wg2-L",
        };
        f.write_str(s)
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wg1-r" => Ok(Channel::Wg1Right),
            "wg1-l" => Ok(Channel::Wg1Left),
            "wg2-r" => Ok(Channel::Wg2Right),
            "wg2-l" => Ok(Channel::Wg2Left),
            other => Err(Error::invalid(
                "channel",
                format!("expected one of wg1-R, wg1-L, wg2-R, wg2-L, got `{other}`"),
            )),
        }
    }
}

/// Scattering of all inputs into the four optical outputs at one frequency.
///
/// Every block is indexed `[output][input]` over [`Channel::index`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortScattering {
    /// Fourier frequency in the frame rotating with the pump.
    pub frequency: f64,
    /// Probe detuning from the optical resonance, `omega + Delta`.
    pub delta: f64,
    /// `f_in(omega) -> f_out(omega)`.
    pub s_optical: [[C64; 4]; 4],
    /// `f_in^dag(-omega) -> f_out(omega)`.
    pub s_conjugate: [[C64; 4]; 4],
    /// `(xi(omega), xi^dag(-omega)) -> f_out(omega)`.
    pub s_mech: [[C64; 2]; 4],
    /// 1-norm condition number of `-M + i omega`.
    pub condition: f64,
}

impl PortScattering {
    pub fn get(&self, output: Channel, input: Channel) -> C64 {
        self.s_optical[output.index()][input.index()]
    }

    pub fn conjugate(&self, output: Channel, input: Channel) -> C64 {
        self.s_conjugate[output.index()][input.index()]
    }

    /// Straight-through amplitude of a channel (`t_R` for wg1-R, etc.).
    pub fn transmission(&self, channel: Channel) -> C64 {
        self.get(channel, channel)
    }
}

/// Frequency-domain solver for one linearized model.
///
/// Building it validates the model and computes its stability once; each
/// [`Scatterer::at`] call is then a single dense 6x6 LU solve.
#[derive(Debug, Clone)]
pub struct Scatterer {
    model: LinearizedModel,
    coupling: CouplingMatrix,
    stability: StabilityReport,
}

impl Scatterer {
    /// Fails for invalid or unstable models. Marginal models (an undamped,
    /// uncoupled mechanical mode) are accepted; their isolated resonances are
    /// caught by the condition-number check.
    pub fn new(model: &LinearizedModel) -> Result<Self> {
        model.validate()?;
        let coupling = build_coupling_matrix(model);
        let stability = stability_check(&coupling);
        if stability.is_unstable() {
            return Err(Error::Unstable {
                margin: stability.margin,
            });
        }
        Ok(Self {
            model: *model,
            coupling,
            stability,
        })
    }

    pub fn model(&self) -> &LinearizedModel {
        &self.model
    }

    pub fn coupling(&self) -> &CouplingMatrix {
        &self.coupling
    }

    pub fn stability(&self) -> &StabilityReport {
        &self.stability
    }

    /// Response matrix `T(omega) = (-M + i omega)^{-1}` and its condition number.
    pub fn response(&self, omega: f64) -> Result<(Matrix6<C64>, f64)> {
        response(&self.coupling, omega)
    }

    pub fn at(&self, omega: f64) -> Result<PortScattering> {
        let (t, condition) = self.response(omega)?;
        let model = &self.model;
        let sqrt_gamma = model.gamma_m.sqrt();
        let zero = C64::new(0.0, 0.0);
        let mut s_optical = [[zero; 4]; 4];
        let mut s_conjugate = [[zero; 4]; 4];
        let mut s_mech = [[zero; 2]; 4];
        for out in Channel::ALL {
            let k_out = out.coupling(model);
            let row = out.mode_slot();
            for inp in Channel::ALL {
                let k = k_out * inp.coupling(model);
                let col = inp.mode_slot();
                let direct = if out == inp { 1.0 } else { 0.0 };
                s_optical[out.index()][inp.index()] = direct + k * t[(row, col)];
                s_conjugate[out.index()][inp.index()] = k * t[(row, col + 3)];
            }
            s_mech[out.index()] = [
                k_out * sqrt_gamma * t[(row, MECH)],
                k_out * sqrt_gamma * t[(row, MECH_DAG)],
            ];
        }
        Ok(PortScattering {
            frequency: omega,
            delta: omega + model.delta,
            s_optical,
            s_conjugate,
            s_mech,
            condition,
        })
    }

    /// Scattering at probe detuning `delta` (so `omega = delta - Delta`).
    pub fn at_detuning(&self, delta: f64) -> Result<PortScattering> {
        self.at(delta - self.model.delta)
    }
}

fn one_norm(m: &Matrix6<C64>) -> f64 {
    (0..6)
        .map(|c| (0..6).map(|r| m[(r, c)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub(crate) fn response(coupling: &CouplingMatrix, omega: f64) -> Result<(Matrix6<C64>, f64)> {
    if !omega.is_finite() {
        return Err(Error::invalid("omega", "must be finite"));
    }
    let a = Matrix6::<C64>::identity() * C64::new(0.0, omega) - coupling.m;
    let t = a.lu().try_inverse().ok_or(Error::SingularResponse {
        omega,
        condition: f64::INFINITY,
    })?;
    let condition = one_norm(&a) * one_norm(&t);
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(Error::SingularResponse { omega, condition });
    }
    Ok((t, condition))
}

/// Full scattering of `model` at Fourier frequency `omega`.
pub fn scattering_matrix(model: &LinearizedModel, omega: f64) -> Result<PortScattering> {
    Scatterer::new(model)?.at(omega)
}

/// Evaluates one scattering element over a frequency grid.
///
/// Columns: `omega, delta, re, im, abs2, phase`. Points where the solve fails
/// are kept as flagged rows; only an invalid or unstable model aborts.
pub fn transmission_spectrum(
    model: &LinearizedModel,
    omega_grid: &[f64],
    input: Channel,
    output: Channel,
    unwrap: bool,
) -> Result<SweepTable> {
    let scatterer = Scatterer::new(model)?;
    let points: Vec<Result<C64>> = omega_grid
        .par_iter()
        .map(|&w| scatterer.at(w).map(|s| s.get(output, input)))
        .collect();
    let mut table = SweepTable::new(["omega", "delta", "re", "im", "abs2", "phase"]);
    for (&w, point) in omega_grid.iter().zip(points) {
        let delta = w + model.delta;
        match point {
            Ok(z) => {
                let phase = if z.norm() > 1e-14 { z.arg() } else { f64::NAN };
                table.push(vec![w, delta, z.re, z.im, z.norm_sqr(), phase]);
            }
            Err(e) => table.push_flagged(&[w, delta], e.to_string()),
        }
    }
    if unwrap {
        table.unwrap_column("phase");
    }
    Ok(table)
}
