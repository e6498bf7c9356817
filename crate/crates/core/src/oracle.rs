//! Time-domain cross-check of the frequency-domain solver.
//!
//! Integrates `dv/dt = -M v - sqrt(2 kappa_p) u(t)` with fixed-step RK4 for a
//! monochromatic drive `u(t) = A e^{-i omega t}` on a single input slot, then
//! projects each output `f_out = f_in + sqrt(2 kappa_p) a` onto
//! `e^{-i omega t}` over the tail of the run. Nothing here touches the
//! frequency-domain response; only the drift matrix `M` is shared.

use nalgebra::Vector6;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::LinearizedModel;
use crate::solver::{build_coupling_matrix, stability_check, Channel};
use crate::C64;

/// Relative drift of the projected amplitude between the two halves of the
/// projection window above which the run counts as unsettled.
pub const SETTLE_TOLERANCE: f64 = 1e-6;
/// Norm growth over the early-run maximum treated as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

/// Which input slot the probe drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sector {
    /// `f_in(omega)`, giving the phase-insensitive elements.
    Direct,
    /// `f_in^dag(-omega)`, giving the phase-sensitive elements.
    Conjugate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub channel: Channel,
    pub sector: Sector,
    /// Probe detuning `delta = omega + Delta`.
    pub delta: f64,
    pub amplitude: C64,
}

impl Probe {
    pub fn new(channel: Channel, delta: f64) -> Self {
        Self {
            channel,
            sector: Sector::Direct,
            delta,
            amplitude: C64::new(1.0, 0.0),
        }
    }

    pub fn conjugate(mut self) -> Self {
        self.sector = Sector::Conjugate;
        self
    }

    pub fn with_amplitude(mut self, amplitude: impl Into<C64>) -> Self {
        self.amplitude = amplitude.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeDomainRun {
    pub model: LinearizedModel,
    pub probe: Probe,
    pub duration: f64,
    pub dt: f64,
    /// Leading fraction of the run discarded as transient.
    pub transient_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeDomainResponse {
    /// `B / A` for each output channel, indexed by [`Channel::index`].
    pub amplitudes: [C64; 4],
    pub drift: f64,
    pub steps: usize,
}

impl TimeDomainResponse {
    pub fn get(&self, output: Channel) -> C64 {
        self.amplitudes[output.index()]
    }
}

impl TimeDomainRun {
    /// Step of at most `1 / (50 max rate)` and a duration of 25 decay times of
    /// the slowest mode. Unstable or marginal models get `200 / kappa_t`.
    pub fn new(model: &LinearizedModel, probe: Probe) -> Self {
        let omega = probe.delta - model.delta;
        let fastest = [
            model.omega_m,
            model.delta.abs(),
            model.kappa_t(),
            omega.abs(),
            model.g_r.norm(),
            model.g_l.norm(),
            model.beta.norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let report = stability_check(&build_coupling_matrix(model));
        let decay = if report.stable {
            report.margin.min(model.kappa_t())
        } else {
            model.kappa_t() / 10.0
        };
        Self {
            model: *model,
            probe,
            duration: 25.0 / decay,
            dt: 1.0 / (50.0 * fastest),
            transient_fraction: 0.75,
        }
    }

    pub fn with_duration(mut self, duration: f64) -> Self {
        self.duration = duration;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("dt", "must be > 0"));
        }
        if !(self.duration.is_finite() && self.duration > self.dt) {
            return Err(Error::invalid("duration", "must exceed dt"));
        }
        if !(0.0..1.0).contains(&self.transient_fraction) {
            return Err(Error::invalid("transient_fraction", "must lie in [0, 1)"));
        }
        let a = self.probe.amplitude;
        if !(a.re.is_finite() && a.im.is_finite()) || a.norm() == 0.0 {
            return Err(Error::invalid("amplitude", "must be finite and nonzero"));
        }
        Ok(())
    }
}

/// Runs the integration and returns `B / A` for every optical output.
pub fn time_domain_response(run: &TimeDomainRun) -> Result<TimeDomainResponse> {
    run.validate()?;
    let model = &run.model;
    let probe = run.probe;
    let omega = probe.delta - model.delta;
    let m = build_coupling_matrix(model).m;

    // make the step commensurate with the drive period and the projection
    // window an even number of periods
    let window = run.duration * (1.0 - run.transient_fraction);
    let (dt, window_steps, total_steps) = if omega != 0.0 {
        let period = std::f64::consts::TAU / omega.abs();
        let per_period = (period / run.dt).ceil().max(1.0) as usize;
        let dt = period / per_period as f64;
        let periods = (((window / period).floor() as usize) / 2 * 2).max(2);
        let window_steps = periods * per_period;
        let transient_steps = (run.duration * run.transient_fraction / dt).ceil() as usize;
        (dt, window_steps, transient_steps + window_steps)
    } else {
        let total = (run.duration / run.dt).ceil() as usize;
        let window_steps = (((window / run.dt).floor() as usize) / 2 * 2).max(2);
        (run.dt, window_steps, total.max(window_steps))
    };

    let in_slot = probe.channel.mode_slot()
        + match probe.sector {
            Sector::Direct => 0,
            Sector::Conjugate => 3,
        };
    let in_coupling = probe.channel.coupling(model);
    let amplitude = probe.amplitude;
    let drive = |t: f64| amplitude * C64::new(0.0, -omega * t).exp();
    let rhs = |t: f64, v: &Vector6<C64>| -> Vector6<C64> {
        let mut dv = -(m * v);
        dv[in_slot] -= in_coupling * drive(t);
        dv
    };

    let mut v = Vector6::<C64>::zeros();
    let window_start = total_steps - window_steps;
    let early_steps = (total_steps / 10).max(1);
    let mut early_max: f64 = 0.0;
    let mut sums = [[C64::new(0.0, 0.0); 4]; 2];
    let outputs = |t: f64, v: &Vector6<C64>| -> [C64; 4] {
        let mut y = [C64::new(0.0, 0.0); 4];
        for out in Channel::ALL {
            let mut value = out.coupling(model) * v[out.mode_slot()];
            if out == probe.channel && probe.sector == Sector::Direct {
                value += drive(t);
            }
            y[out.index()] = value;
        }
        y
    };

    for step in 0..total_steps {
        let t = step as f64 * dt;
        let k1 = rhs(t, &v);
        let k2 = rhs(t + 0.5 * dt, &(v + k1 * C64::from(0.5 * dt)));
        let k3 = rhs(t + 0.5 * dt, &(v + k2 * C64::from(0.5 * dt)));
        let k4 = rhs(t + dt, &(v + k3 * C64::from(dt)));
        v += (k1 + k2 * C64::from(2.0) + k3 * C64::from(2.0) + k4) * C64::from(dt / 6.0);

        let norm = v.norm();
        let t_next = (step + 1) as f64 * dt;
        if step < early_steps {
            early_max = early_max.max(norm);
        } else if !norm.is_finite() || norm > DIVERGENCE_FACTOR * early_max.max(f64::MIN_POSITIVE) {
            return Err(Error::Diverged { time: t_next, norm });
        }

        let k = step + 1;
        if k > window_start {
            let half = usize::from(k - window_start > window_steps / 2);
            let phase = C64::new(0.0, omega * t_next).exp();
            for (acc, y) in sums[half].iter_mut().zip(outputs(t_next, &v)) {
                *acc += y * phase;
            }
        }
    }

    let half_len = (window_steps / 2) as f64;
    let mut amplitudes = [C64::new(0.0, 0.0); 4];
    let mut drift: f64 = 0.0;
    let scale = (0..4)
        .map(|i| ((sums[0][i] + sums[1][i]) / (2.0 * half_len) / amplitude).norm())
        .fold(0.0, f64::max);
    for i in 0..4 {
        let first = sums[0][i] / half_len / amplitude;
        let second = sums[1][i] / half_len / amplitude;
        amplitudes[i] = (first + second) * 0.5;
        drift = drift.max((first - second).norm() / scale.max(f64::MIN_POSITIVE));
    }
    if drift > SETTLE_TOLERANCE {
        return Err(Error::NotSettled { drift });
    }
    Ok(TimeDomainResponse {
        amplitudes,
        drift,
        steps: total_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DeviceParams;
    use crate::solver::Scatterer;

    #[test]
    fn bare_resonator_lorentzian() {
        let params = DeviceParams::new(20.0, 1.0)
            .with_kappa_in(0.3)
            .with_gamma_m(0.05);
        let model = LinearizedModel::from_couplings(&params, 0.0, 0.0, -5.0);
        for delta in [-1.5, 0.0, 0.8] {
            let r = time_domain_response(&TimeDomainRun::new(
                &model,
                Probe::new(Channel::Wg1Left, delta),
            ))
            .unwrap();
            let expected = C64::new(0.3 - 1.0, -delta) / C64::new(1.3, -delta);
            assert!((r.get(Channel::Wg1Left) - expected).norm() < 1e-6 * expected.norm());
        }
    }

    #[test]
    fn conjugate_sector_matches_solver() {
        let model = LinearizedModel::red_sideband(20.0, 5.0, 1.0, 0.5, 0.0);
        let delta = 1.3;
        let r = time_domain_response(&TimeDomainRun::new(
            &model,
            Probe::new(Channel::Wg1Right, delta).conjugate(),
        ))
        .unwrap();
        let s = Scatterer::new(&model).unwrap().at_detuning(delta).unwrap();
        let expected = s.conjugate(Channel::Wg1Right, Channel::Wg1Right);
        assert!((r.get(Channel::Wg1Right) - expected).norm() < 1e-6 * expected.norm());
    }

    #[test]
    fn response_is_independent_of_drive_amplitude() {
        let model = LinearizedModel::red_sideband(20.0, 5.0, 1.0, 1.0, 0.0).with_beta(2.0);
        let reference = time_domain_response(&TimeDomainRun::new(
            &model,
            Probe::new(Channel::Wg1Right, 0.4),
        ))
        .unwrap();
        for a in [C64::new(1e-3, 0.0), C64::new(0.0, 1e3)] {
            let r = time_domain_response(&TimeDomainRun::new(
                &model,
                Probe::new(Channel::Wg1Right, 0.4).with_amplitude(a),
            ))
            .unwrap();
            for ch in Channel::ALL {
                let (x, y) = (r.get(ch), reference.get(ch));
                assert!((x - y).norm() <= 1e-9 * (1.0 + y.norm()));
            }
        }
    }

    #[test]
    fn short_run_is_reported_unsettled() {
        let model = LinearizedModel::red_sideband(20.0, 5.0, 1.0, 1.0, 0.01);
        let run = TimeDomainRun::new(&model, Probe::new(Channel::Wg1Right, 0.0)).with_duration(3.0);
        assert!(matches!(
            time_domain_response(&run),
            Err(Error::NotSettled { .. })
        ));
    }

    #[test]
    fn unstable_model_diverges() {
        let model = LinearizedModel::red_sideband(20.0, 12.0, 1.0, 1.0, 0.01);
        let run =
            TimeDomainRun::new(&model, Probe::new(Channel::Wg1Right, 0.0)).with_duration(100.0);
        assert!(matches!(
            time_domain_response(&run),
            Err(Error::Diverged { .. })
        ));
    }
}
