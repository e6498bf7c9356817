//! Closed-form transmission of the idealized single-waveguide device.
//!
//! Rotating-wave limit with no backscattering: the two circulating modes
//! never mix, so reflections vanish and each direction sees its own
//! transmission. The left-moving probe sees the bare resonator; the
//! right-moving probe sees an EIT-like window opened by the pump.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Rates of the idealized device. `g_r` is the magnitude of the enhanced
/// coupling of the pumped (right-circulating) mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyModel {
    pub kappa: f64,
    pub kappa_in: f64,
    pub gamma_m: f64,
    pub g_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyTransmission {
    pub t_r: C64,
    pub t_l: C64,
    /// Probe detuning from the optical resonance.
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseShift {
    pub theta_r: f64,
    pub theta_l: f64,
    pub delta_theta: f64,
}

impl ToyModel {
    pub fn new(kappa: f64, kappa_in: f64, gamma_m: f64, g_r: f64) -> Self {
        Self {
            kappa,
            kappa_in,
            gamma_m,
            g_r: g_r.abs(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("kappa", self.kappa),
            ("kappa_in", self.kappa_in),
            ("gamma_m", self.gamma_m),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::invalid(
                    name,
                    format!("must be finite and >= 0, got {value}"),
                ));
            }
        }
        if !self.g_r.is_finite() {
            return Err(Error::invalid("g_r", "must be finite"));
        }
        Ok(())
    }

    pub fn transmission(&self, delta: f64) -> ToyTransmission {
        let ToyModel {
            kappa,
            kappa_in,
            gamma_m,
            g_r,
        } = *self;
        let t_l = C64::new(kappa_in - kappa, -delta) / C64::new(kappa_in + kappa, -delta);
        let mech = C64::new(gamma_m / 2.0, -delta);
        let denom = g_r * g_r + mech * C64::new(kappa + kappa_in, -delta);
        // G_R = gamma_m = delta = 0: the analytic limit is the bare line
        let t_r = if denom == C64::new(0.0, 0.0) {
            t_l
        } else {
            1.0 - 2.0 * kappa * mech / denom
        };
        ToyTransmission { t_r, t_l, delta }
    }

    /// Phases of both transmissions and their difference, all in `(-pi, pi]`.
    pub fn phase_shift(&self, delta: f64) -> Result<PhaseShift> {
        let t = self.transmission(delta);
        let theta_r = phase(t.t_r, delta)?;
        let theta_l = phase(t.t_l, delta)?;
        Ok(PhaseShift {
            theta_r,
            theta_l,
            delta_theta: principal(theta_r - theta_l),
        })
    }

    /// Isolation contrast `|t_R|^2 - |t_L|^2`.
    pub fn isolation_contrast(&self, delta: f64) -> f64 {
        let t = self.transmission(delta);
        t.t_r.norm_sqr() - t.t_l.norm_sqr()
    }

    /// Phase spectrum over `deltas`. With `unwrap` each phase column is made
    /// continuous along the grid instead of folded into `(-pi, pi]`.
    pub fn phase_spectrum(&self, deltas: &[f64], unwrap: bool) -> Result<Vec<PhaseShift>> {
        let mut out = deltas
            .iter()
            .map(|&d| self.phase_shift(d))
            .collect::<Result<Vec<_>>>()?;
        if unwrap {
            let mut r: Vec<f64> = out.iter().map(|p| p.theta_r).collect();
            let mut l: Vec<f64> = out.iter().map(|p| p.theta_l).collect();
            let mut d: Vec<f64> = out.iter().map(|p| p.delta_theta).collect();
            unwrap_phases(&mut r);
            unwrap_phases(&mut l);
            unwrap_phases(&mut d);
            for (i, p) in out.iter_mut().enumerate() {
                *p = PhaseShift {
                    theta_r: r[i],
                    theta_l: l[i],
                    delta_theta: d[i],
                };
            }
        }
        Ok(out)
    }
}

const ZERO_AMPLITUDE: f64 = 1e-14;

fn phase(t: C64, delta: f64) -> Result<f64> {
    if t.norm() <= ZERO_AMPLITUDE {
        return Err(Error::UndefinedPhase { delta });
    }
    Ok(principal(t.arg()))
}

/// Folds an angle into `(-pi, pi]`.
pub fn principal(theta: f64) -> f64 {
    let mut x = theta % (2.0 * PI);
    if x <= -PI {
        x += 2.0 * PI;
    } else if x > PI {
        x -= 2.0 * PI;
    }
    x
}

/// Removes `2 pi` jumps between consecutive samples in place.
pub fn unwrap_phases(phases: &mut [f64]) {
    let mut offset = 0.0;
    for i in 1..phases.len() {
        let raw_prev = phases[i - 1] - offset;
        let jump = phases[i] - raw_prev;
        offset += -2.0 * PI * (jump / (2.0 * PI)).round();
        phases[i] += offset;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn diode_point() {
        let t = ToyModel::new(1.0, 1.0, 0.0, 5.0).transmission(0.0);
        assert_abs_diff_eq!(t.t_r.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.t_r.im, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.t_l.norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            ToyModel::new(1.0, 1.0, 0.0, 5.0).isolation_contrast(0.0),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn singular_point_takes_bare_limit() {
        let t = ToyModel::new(1.0, 0.3, 0.0, 0.0).transmission(0.0);
        assert_eq!(t.t_r, t.t_l);
        assert!(t.t_r.re.is_finite());
    }

    #[test]
    fn transparency_point_phases() {
        let m = ToyModel::new(1.0, 0.0, 0.0, 3.0);
        let t = m.transmission(0.0);
        assert_abs_diff_eq!((t.t_l - C64::new(-1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((t.t_r - C64::new(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        let p = m.phase_shift(0.0).unwrap();
        assert_abs_diff_eq!(p.theta_r, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.theta_l, PI, epsilon = 1e-15);
        assert_abs_diff_eq!(p.delta_theta.abs(), PI, epsilon = 1e-10);
        assert!(p.delta_theta > -PI);
    }

    #[test]
    fn far_detuned_phases_vanish() {
        let m = ToyModel::new(1.0, 0.0, 0.0, 3.0);
        for d in [1e7, -1e7] {
            let p = m.phase_shift(d).unwrap();
            assert!(p.theta_r.abs() < 1e-6 && p.theta_l.abs() < 1e-6);
            assert!(p.delta_theta.abs() < 1e-6);
        }
    }

    #[test]
    fn phase_undefined_at_critical_coupling() {
        let m = ToyModel::new(1.0, 1.0, 0.0, 3.0);
        assert!(matches!(
            m.phase_shift(0.0),
            Err(Error::UndefinedPhase { .. })
        ));
    }

    #[test]
    fn contrast_inside_transparency_window() {
        let m = ToyModel::new(1.0, 1.0, 0.0, 1e3);
        for d in [-2.0, -1.0, -0.3, 0.5, 1.5, 2.0] {
            let c = m.isolation_contrast(d);
            let expected = 4.0 / (4.0 + d * d);
            assert_abs_diff_eq!(c, expected, epsilon = 1e-5);
            assert!(c >= 0.5 - 1e-5);
        }
        assert_abs_diff_eq!(
            ToyModel::new(1.0, 1.0, 0.0, 0.0).isolation_contrast(0.7),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn eit_minima_split_by_twice_the_coupling() {
        // critical coupling puts the |t_R| minima at delta = +-G_R
        let g = 20.0;
        let m = ToyModel::new(1.0, 1.0, 0.0, g);
        let grid: Vec<f64> = (0..=80_000).map(|i| -40.0 + i as f64 * 1e-3).collect();
        let mags: Vec<f64> = grid.iter().map(|&d| m.transmission(d).t_r.norm()).collect();
        let argmin = |range: std::ops::Range<usize>| {
            range
                .min_by(|&a, &b| mags[a].total_cmp(&mags[b]))
                .map(|i| grid[i])
                .unwrap()
        };
        let lo = argmin(0..40_000);
        let hi = argmin(40_001..grid.len());
        assert!(((hi - lo) - 2.0 * g).abs() <= 0.05 * 2.0 * g);
    }

    #[test]
    fn unwrap_removes_jumps() {
        let mut x = vec![3.0, -3.1, 3.0, 2.0];
        unwrap_phases(&mut x);
        assert_abs_diff_eq!(x[1], -3.1 + 2.0 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(x[2], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x[3], 2.0, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn lossless_device_is_unitary(kappa in 0.01f64..10.0, g in 0.0f64..20.0, delta in -50.0f64..50.0) {
            let t = ToyModel::new(kappa, 0.0, 0.0, g).transmission(delta);
            prop_assert!((t.t_r.norm() - 1.0).abs() < 1e-12);
            prop_assert!((t.t_l.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn unpumped_device_is_reciprocal(kappa in 0.01f64..10.0, kin in 0.0f64..5.0, gm in 0.001f64..1.0, delta in -50.0f64..50.0) {
            let t = ToyModel::new(kappa, kin, gm, 0.0).transmission(delta);
            prop_assert!((t.t_r - t.t_l).norm() < 1e-12);
        }

        #[test]
        fn passive_device_never_amplifies(kappa in 0.01f64..10.0, kin in 0.0f64..5.0, gm in 0.0f64..2.0, g in 0.0f64..20.0, delta in -50.0f64..50.0) {
            let t = ToyModel::new(kappa, kin, gm, g).transmission(delta);
            prop_assert!(t.t_r.norm() <= 1.0 + 1e-12);
            prop_assert!(t.t_l.norm() <= 1.0 + 1e-12);
            let c = ToyModel::new(kappa, kin, gm, g).isolation_contrast(delta);
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&c));
        }

        #[test]
        fn principal_range(theta in -100.0f64..100.0) {
            let p = principal(theta);
            prop_assert!(p > -PI && p <= PI);
            prop_assert!(((theta - p) / (2.0 * PI)).fract().abs() < 1e-9
                || (1.0 - ((theta - p) / (2.0 * PI)).fract().abs()) < 1e-9);
        }
    }
}
