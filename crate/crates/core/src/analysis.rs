//! Figures of merit built on the solvers: isolation bandwidth, parameter
//! sweeps of it, intra-resonator pump imbalance and regime labels.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{steady_state_pump_shifted, DeviceParams, LinearizedModel, PumpDrive};
use crate::solver::{Channel, Scatterer};
use crate::table::SweepTable;
use crate::toy::ToyModel;

/// Contrast level `|t_R|^2 - |t_L|^2` that delimits the isolation window.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Maximal interval around `delta = 0` on which the contrast stays at or
/// above `threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthResult {
    pub width: f64,
    pub interval: (f64, f64),
    pub threshold: f64,
    pub center_contrast: f64,
    pub diagnostic: Option<String>,
}

struct Scan {
    step: f64,
    extent: f64,
    tolerance: f64,
}

fn scan_for(kappa: f64, kappa_t: f64, g_r: f64, others: &[f64]) -> Scan {
    let g_max = others.iter().copied().fold(g_r, f64::max);
    // narrowest contrast feature: the weak-coupling window ~ G_R^2 / kappa_t
    let narrow = if g_r > 0.0 {
        kappa_t.min(g_r * g_r / kappa_t)
    } else {
        kappa_t
    };
    let unit = if kappa > 0.0 { kappa } else { kappa_t };
    Scan {
        step: narrow / 50.0,
        extent: 10.0 * (kappa_t + g_max),
        tolerance: 1e-6 * unit,
    }
}

fn window(
    contrast: impl Fn(f64) -> Result<f64>,
    threshold: f64,
    scan: &Scan,
) -> Result<BandwidthResult> {
    let center = contrast(0.0)?;
    if center < threshold {
        return Ok(BandwidthResult {
            width: 0.0,
            interval: (0.0, 0.0),
            threshold,
            center_contrast: center,
            diagnostic: Some(format!(
                "contrast at delta = 0 is {center:.6}, below threshold {threshold}"
            )),
        });
    }
    let mut open_edges = Vec::new();
    let mut edge = |dir: f64| -> Result<f64> {
        let mut inside = 0.0;
        loop {
            let next = inside + scan.step;
            if next > scan.extent {
                open_edges.push(dir);
                return Ok(dir * inside);
            }
            if contrast(dir * next)? < threshold {
                let (mut a, mut b) = (inside, next);
                while b - a > scan.tolerance {
                    let mid = 0.5 * (a + b);
                    if contrast(dir * mid)? >= threshold {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                return Ok(dir * 0.5 * (a + b));
            }
            inside = next;
        }
    };
    let hi = edge(1.0)?;
    let lo = edge(-1.0)?;
    let diagnostic = (!open_edges.is_empty()).then(|| {
        format!(
            "contrast stays above threshold up to the scan limit |delta| = {}",
            scan.extent
        )
    });
    Ok(BandwidthResult {
        width: hi - lo,
        interval: (lo, hi),
        threshold,
        center_contrast: center,
        diagnostic,
    })
}

/// Isolation bandwidth from the full scattering solution.
pub fn isolation_bandwidth(model: &LinearizedModel, threshold: f64) -> Result<BandwidthResult> {
    if !threshold.is_finite() {
        return Err(Error::invalid("threshold", "must be finite"));
    }
    let scatterer = Scatterer::new(model)?;
    let contrast = |delta: f64| -> Result<f64> {
        let s = scatterer.at_detuning(delta)?;
        Ok(s.transmission(Channel::Wg1Right).norm_sqr()
            - s.transmission(Channel::Wg1Left).norm_sqr())
    };
    let scan = scan_for(
        model.kappa,
        model.kappa_t(),
        model.g_r.norm(),
        &[model.g_l.norm(), model.beta.norm()],
    );
    window(contrast, threshold, &scan)
}

/// Isolation bandwidth of the closed-form rotating-wave model.
pub fn toy_isolation_bandwidth(toy: &ToyModel, threshold: f64) -> Result<BandwidthResult> {
    toy.validate()?;
    let kappa_t = toy.kappa + toy.kappa_in;
    if kappa_t <= 0.0 {
        return Err(Error::invalid("kappa_t", "must be > 0"));
    }
    let scan = scan_for(toy.kappa, kappa_t, toy.g_r, &[]);
    window(|d| Ok(toy.isolation_contrast(d)), threshold, &scan)
}

/// Bandwidth over a `(beta, G_R)` grid with `G_L = 0`.
///
/// Rows are ordered beta-major. Cells that fail (e.g. unstable) are flagged.
pub fn bandwidth_contour(
    base: &LinearizedModel,
    beta_grid: &[f64],
    g_r_grid: &[f64],
    threshold: f64,
) -> SweepTable {
    let cells: Vec<(f64, f64)> = beta_grid
        .iter()
        .flat_map(|&b| g_r_grid.iter().map(move |&g| (b, g)))
        .collect();
    let results: Vec<Result<BandwidthResult>> = cells
        .par_iter()
        .map(|&(beta, g)| {
            let model = base.with_beta(beta).with_g_r(g).with_g_l(0.0);
            isolation_bandwidth(&model, threshold)
        })
        .collect();
    let mut table = SweepTable::new(["beta", "g_r", "width", "delta_lo", "delta_hi"]);
    for (&(beta, g), r) in cells.iter().zip(results) {
        match r {
            Ok(bw) => table.push(vec![beta, g, bw.width, bw.interval.0, bw.interval.1]),
            Err(e) => table.push_flagged(&[beta, g], e.to_string()),
        }
    }
    table
}

/// Intra-resonator populations per unit right-going drive as a function of
/// the (shifted) pump detuning.
pub fn pump_imbalance_curve(params: &DeviceParams, delta_grid: &[f64]) -> Result<SweepTable> {
    params.validate()?;
    let drive = PumpDrive::right(1.0);
    let mut table = SweepTable::new(["delta", "abs_alpha_r2", "abs_alpha_l2", "ratio_l_over_r"]);
    for &delta in delta_grid {
        match steady_state_pump_shifted(params, &drive, delta) {
            Ok(s) => {
                let ratio = if s.alpha_r.norm() > 0.0 {
                    (s.alpha_l / s.alpha_r).norm()
                } else {
                    f64::NAN
                };
                table.push(vec![
                    delta,
                    s.alpha_r.norm_sqr(),
                    s.alpha_l.norm_sqr(),
                    ratio,
                ]);
            }
            Err(e) => table.push_flagged(&[delta], e.to_string()),
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingRegime {
    Weak,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PortRegime {
    CriticallyCoupled,
    OverCoupled,
    UnderCoupled,
    AddDrop,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sideband {
    Resolved,
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeClassification {
    pub coupling_regime: CouplingRegime,
    pub port_regime: PortRegime,
    pub sideband: Sideband,
}

/// Relative tolerance for "equal" rates in port labels.
pub const PORT_TOLERANCE: f64 = 0.1;
/// `omega_m > SIDEBAND_FACTOR * kappa_t` counts as sideband resolved.
pub const SIDEBAND_FACTOR: f64 = 4.0;

/// Labels the operating point.
///
/// - coupling: strong iff `|G_R| > kappa_t`
/// - ports (single waveguide, `kappa' = 0`): critically coupled if
///   `|kappa - kappa_in| <= 0.1 kappa`, over-coupled if `kappa_in <= 0.1 kappa`,
///   under-coupled if `kappa_in > kappa`; two waveguides: add-drop if
///   `|kappa - kappa'| <= 0.1 kappa` and `kappa_in <= 0.1 kappa`
/// - sideband: resolved iff `omega_m > 4 kappa_t`
pub fn classify_regime(params: &DeviceParams, model: &LinearizedModel) -> RegimeClassification {
    let kappa_t = model.kappa_t();
    let coupling_regime = if model.g_r.norm() > kappa_t {
        CouplingRegime::Strong
    } else {
        CouplingRegime::Weak
    };
    let (k, kp, kin) = (params.kappa, params.kappa_prime, params.kappa_in);
    let port_regime = if k <= 0.0 {
        PortRegime::Other
    } else if kp == 0.0 {
        if (k - kin).abs() <= PORT_TOLERANCE * k {
            PortRegime::CriticallyCoupled
        } else if kin <= PORT_TOLERANCE * k {
            PortRegime::OverCoupled
        } else if kin > k {
            PortRegime::UnderCoupled
        } else {
            PortRegime::Other
        }
    } else if (k - kp).abs() <= PORT_TOLERANCE * k && kin <= PORT_TOLERANCE * k {
        PortRegime::AddDrop
    } else {
        PortRegime::Other
    };
    let sideband = if model.omega_m > SIDEBAND_FACTOR * kappa_t {
        Sideband::Resolved
    } else {
        Sideband::Unresolved
    };
    RegimeClassification {
        coupling_regime,
        port_regime,
        sideband,
    }
}

impl fmt::Display for CouplingRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CouplingRegime::Weak => "weak coupling",
            CouplingRegime::Strong => "strong coupling",
        })
    }
}

impl fmt::Display for PortRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PortRegime::CriticallyCoupled => "critically coupled",
            PortRegime::OverCoupled => "over-coupled",
            PortRegime::UnderCoupled => "under-coupled",
            PortRegime::AddDrop => "add-drop",
            PortRegime::Other => "other",
        })
    }
}

impl fmt::Display for Sideband {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sideband::Resolved => "sideband resolved",
            Sideband::Unresolved => "sideband unresolved",
        })
    }
}

impl fmt::Display for RegimeClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}, {}, {}",
            self.coupling_regime, self.sideband, self.port_regime
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::hz_to_angular;
    use proptest::prelude::*;

    fn fig5(g: f64) -> LinearizedModel {
        LinearizedModel::red_sideband(20.0, g, 1.0, 1.0, 0.0)
    }

    #[test]
    fn unpumped_device_has_no_window() {
        let params = DeviceParams::new(20.0, 1.0)
            .with_kappa_in(1.0)
            .with_gamma_m(0.01);
        let model = LinearizedModel::from_couplings(&params, 0.0, 0.0, -20.0);
        let bw = isolation_bandwidth(&model, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(bw.width, 0.0);
        assert!(bw.diagnostic.is_some());
    }

    #[test]
    fn window_contains_center_and_meets_threshold() {
        let model = fig5(5.0);
        let bw = isolation_bandwidth(&model, 0.5).unwrap();
        assert!(bw.interval.0 < 0.0 && bw.interval.1 > 0.0);
        assert!((bw.width - (bw.interval.1 - bw.interval.0)).abs() < 1e-15);
        let s = Scatterer::new(&model).unwrap();
        for i in 0..=50 {
            let d =
                bw.interval.0 + (bw.interval.1 - bw.interval.0) * (0.001 + 0.998 * i as f64 / 50.0);
            let p = s.at_detuning(d).unwrap();
            let c = p.transmission(Channel::Wg1Right).norm_sqr()
                - p.transmission(Channel::Wg1Left).norm_sqr();
            assert!(c >= 0.5 - 1e-6);
        }
    }

    #[test]
    fn toy_window_matches_closed_form_edge() {
        // edge solves |t_R|^2 - |t_L|^2 = 1/2; locate it independently by
        // dense sampling and linear interpolation
        let toy = ToyModel::new(1.0, 1.0, 0.0, 5.0);
        let bw = toy_isolation_bandwidth(&toy, 0.5).unwrap();
        let f = |d: f64| toy.isolation_contrast(d) - 0.5;
        let mut edge = f64::NAN;
        let n = 400_000;
        for i in 0..n {
            let a = 4.0 * i as f64 / n as f64;
            let b = 4.0 * (i + 1) as f64 / n as f64;
            if f(a) >= 0.0 && f(b) < 0.0 {
                edge = a + (b - a) * f(a) / (f(a) - f(b));
                break;
            }
        }
        assert!((bw.interval.1 - edge).abs() < 1e-3);
        assert!((bw.interval.0 + edge).abs() < 1e-3);
    }

    #[test]
    fn contour_baseline_and_trends() {
        let base = fig5(5.0);
        let betas = [0.0, 1.0, 2.0, 4.0];
        let gs = [5.0, 7.0, 9.0];
        let table = bandwidth_contour(&base, &betas, &gs, 0.5);
        assert_eq!(table.len(), 12);
        assert_eq!(table.flagged_count(), 0);
        let w = table.column("width").unwrap();
        let at = |bi: usize, gi: usize| w[bi * gs.len() + gi];
        for gi in 0..gs.len() {
            for bi in 1..betas.len() {
                assert!(at(bi, gi) <= at(bi - 1, gi) + 1e-6);
            }
        }
        for bi in 1..betas.len() {
            for gi in 1..gs.len() {
                assert!(at(bi, gi) >= at(bi, gi - 1) - 1e-6);
            }
        }
        for gi in 0..gs.len() {
            assert!((at(0, gi) - 4.0).abs() < 0.3);
        }
    }

    #[test]
    fn imbalance_curve_limits() {
        let params = DeviceParams::new(20.0, 1.0)
            .with_kappa_in(1.0)
            .with_beta(4.0);
        let t = pump_imbalance_curve(&params, &[-4.0, 4.0, -400.0]).unwrap();
        let ratio = t.column("ratio_l_over_r").unwrap();
        let near = 4.0 / (16.0f64 + 4.0).sqrt();
        assert!((ratio[0] - near).abs() < 1e-12 && (ratio[1] - near).abs() < 1e-12);
        assert!(ratio[0] > 0.89);
        assert!((ratio[2] - 4.0 / 400.0).abs() < 1e-4);

        let params = DeviceParams::new(20.0, 1.0).with_kappa_in(1.0);
        let t = pump_imbalance_curve(&params, &[-10.0, 0.0, 10.0]).unwrap();
        assert!(t.column("abs_alpha_l2").unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn microtoroid_operating_point() {
        let params = DeviceParams::new(hz_to_angular(78e6), hz_to_angular(7.1e6))
            .with_g0(hz_to_angular(3.4e3));
        let model =
            LinearizedModel::from_couplings(&params, hz_to_angular(11.4e6), 0.0, -params.omega_m);
        let r = classify_regime(&params, &model);
        assert_eq!(r.coupling_regime, CouplingRegime::Strong);
        assert_eq!(r.sideband, Sideband::Resolved);
    }

    #[test]
    fn port_labels() {
        let label = |kin: f64, kp: f64| {
            let p = DeviceParams::new(20.0, 1.0)
                .with_kappa_in(kin)
                .with_kappa_prime(kp);
            let m = LinearizedModel::from_couplings(&p, 1.0, 0.0, -20.0);
            classify_regime(&p, &m).port_regime
        };
        assert_eq!(label(1.0, 0.0), PortRegime::CriticallyCoupled);
        assert_eq!(label(0.01, 0.0), PortRegime::OverCoupled);
        assert_eq!(label(3.0, 0.0), PortRegime::UnderCoupled);
        assert_eq!(label(0.0, 1.0), PortRegime::AddDrop);
        assert_eq!(label(0.5, 0.0), PortRegime::Other);
    }

    proptest! {
        #[test]
        fn classification_is_scale_invariant(
            scale in 1e-3f64..1e6,
            wm in 0.5f64..50.0, k in 0.1f64..3.0, kin in 0.0f64..3.0, kp in 0.0f64..3.0, g in 0.0f64..10.0,
        ) {
            let p = DeviceParams::new(wm, k).with_kappa_in(kin).with_kappa_prime(kp);
            let m = LinearizedModel::from_couplings(&p, g, 0.0, -wm);
            let ps = DeviceParams::new(wm * scale, k * scale)
                .with_kappa_in(kin * scale)
                .with_kappa_prime(kp * scale);
            let ms = LinearizedModel::from_couplings(&ps, g * scale, 0.0, -wm * scale);
            prop_assert_eq!(classify_regime(&p, &m), classify_regime(&ps, &ms));
        }
    }
}
