//! One function per task, each turning a resolved configuration into a
//! [`Report`].

use omring_core::analysis::{
    bandwidth_contour, classify_regime, isolation_bandwidth, pump_imbalance_curve,
    toy_isolation_bandwidth, BandwidthResult, CouplingRegime, Sideband,
};
use omring_core::model::{
    cancellation_drive, cancellation_drive_shifted, linearize, steady_state_pump,
    steady_state_pump_shifted, LinearizedModel, PumpDrive, PumpSteadyState,
};
use omring_core::noise::{noise_power, noise_spectral_density, Band, NoiseMethod};
use omring_core::oracle::{time_domain_response, Probe, TimeDomainRun};
use omring_core::solver::{build_coupling_matrix, stability_check, Scatterer};
use omring_core::squeezing::{squeezing_ratio, SqueezingModel};
use omring_core::toy::{principal, ToyModel};
use omring_core::{Channel, SweepTable, C64};
use rayon::prelude::*;

use crate::config::{
    linspace_point, DetuningMode, ModelKind, OperatingPoint, RunConfig, Task, UnitMode,
};
use crate::error::CliError;
use crate::output::{format_number, Cell, Report};

pub const CONVENTIONS: &str =
    "fields ~ e^{-i omega t}; omega is the Fourier frequency in the pump frame; \
delta = omega + Delta is the probe detuning from the optical resonance; \
t_R, t_L are output/input amplitudes of waveguide 1; phases principal in (-pi, pi]";

/// A finished task: the table, plus a failure to report after writing it.
pub struct Outcome {
    pub report: Report,
    pub failure: Option<CliError>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Self {
            report,
            failure: None,
        }
    }
}

struct Context<'a> {
    cfg: &'a RunConfig,
    model: LinearizedModel,
    pump: Option<PumpSteadyState>,
    /// Internal-to-user factor for frequency-valued numbers.
    out_scale: f64,
}

impl Context<'_> {
    fn user(&self, x: f64) -> String {
        format_number(x * self.out_scale)
    }

    fn grid(&self) -> Vec<f64> {
        self.cfg.delta_grid.clone().unwrap_or_else(|| {
            let span = 5.0 * self.model.kappa_t();
            (0..401)
                .map(|i| linspace_point(-span, span, i, 401))
                .collect()
        })
    }

    fn toy(&self) -> Result<ToyModel, CliError> {
        let m = &self.model;
        let toy = ToyModel::new(m.kappa, m.kappa_in, m.gamma_m, m.g_r.norm());
        toy.validate()?;
        Ok(toy)
    }

    fn finish(&self, mut report: Report, frequency_columns: &[&str]) -> Report {
        report.scale_columns(frequency_columns, self.out_scale);
        let mut meta = header(self);
        meta.append(&mut report.metadata);
        report.metadata = meta;
        report
    }
}

fn header(ctx: &Context<'_>) -> Vec<(String, String)> {
    let cfg = ctx.cfg;
    let m = &ctx.model;
    let mut meta = vec![
        (
            "generator".to_string(),
            format!(
                "omring {} (omring-core {})",
                env!("CARGO_PKG_VERSION"),
                omring_core::VERSION
            ),
        ),
        ("conventions".to_string(), CONVENTIONS.to_string()),
        (
            "units".to_string(),
            match cfg.units {
                UnitMode::Kappa => {
                    "rates and frequencies in units of a common reference rate".to_string()
                }
                UnitMode::Hz => {
                    "frequency-valued columns in Hz (cyclic); fluxes in photons per second"
                        .to_string()
                }
            },
        ),
        (
            "bandwidth_threshold".to_string(),
            format!(
                "{} on |t_R|^2 - |t_L|^2",
                format_number(cfg.options.threshold)
            ),
        ),
    ];
    for (k, v) in &cfg.echo {
        meta.push((format!("input.{k}"), v.clone()));
    }
    let c = |z: C64| format!("{} + {}i", ctx.user(z.re), ctx.user(z.im));
    meta.push(("model.g_r".to_string(), c(m.g_r)));
    meta.push(("model.g_l".to_string(), c(m.g_l)));
    meta.push(("model.delta".to_string(), ctx.user(m.delta)));
    meta.push(("model.kappa_t".to_string(), ctx.user(m.kappa_t())));
    let report = stability_check(&build_coupling_matrix(m));
    meta.push((
        "model.stability".to_string(),
        format!(
            "{} (margin {})",
            if report.stable {
                "stable"
            } else if report.marginal {
                "marginal"
            } else {
                "unstable"
            },
            ctx.user(report.margin)
        ),
    ));
    for w in cfg.device.warnings() {
        meta.push(("warning".to_string(), w));
    }
    meta
}

fn operating_point(
    cfg: &RunConfig,
) -> Result<(LinearizedModel, Option<PumpSteadyState>), CliError> {
    let p = &cfg.device;
    match cfg.operating_point {
        OperatingPoint::Coupling { g_r, g_l, delta } => {
            let model = LinearizedModel::from_couplings(p, g_r, g_l, delta);
            model.validate()?;
            Ok((model, None))
        }
        OperatingPoint::Pump {
            drive_right,
            drive_left,
            detuning,
        } => {
            let state = match detuning {
                DetuningMode::Bare => {
                    let left = match drive_left {
                        Some(l) => l,
                        None => cancellation_drive(p, drive_right)?,
                    };
                    steady_state_pump(p, &PumpDrive::both(drive_right, left))?
                }
                DetuningMode::Shifted => {
                    let left = drive_left
                        .unwrap_or_else(|| cancellation_drive_shifted(p, p.delta0, drive_right));
                    steady_state_pump_shifted(p, &PumpDrive::both(drive_right, left), p.delta0)?
                }
            };
            Ok((linearize(p, &state), Some(state)))
        }
    }
}

pub fn execute(task: Task, cfg: &RunConfig) -> Result<Outcome, CliError> {
    if let Some(t) = cfg.task {
        if t != task {
            return Err(CliError::config(format!(
                "config declares task '{}' but '{}' was requested",
                t.name(),
                task.name()
            )));
        }
    }
    let (model, pump) = operating_point(cfg)?;
    let ctx = Context {
        cfg,
        model,
        pump,
        out_scale: 1.0 / cfg.units.to_internal(),
    };
    let mut outcome = match task {
        Task::Pump => pump_task(&ctx)?.into(),
        Task::Spectrum => spectrum(&ctx)?.into(),
        Task::Phase => phase(&ctx)?.into(),
        Task::Bandwidth => bandwidth(&ctx)?.into(),
        Task::Contour => contour(&ctx)?.into(),
        Task::Noise => noise(&ctx)?.into(),
        Task::Squeezing => squeezing(&ctx)?.into(),
        Task::Classify => classify(&ctx)?.into(),
        Task::Verify => verify(&ctx)?,
    };
    let mut meta = vec![("task".to_string(), task.name().to_string())];
    meta.append(&mut outcome.report.metadata);
    outcome.report.metadata = meta;
    Ok(outcome)
}

fn pump_task(ctx: &Context<'_>) -> Result<Report, CliError> {
    let Some(state) = ctx.pump else {
        return Err(CliError::config("task 'pump' needs a [pump] section"));
    };
    if let Some(grid) = &ctx.cfg.delta_grid {
        // imbalance of the circulating pump against its detuning
        let table = pump_imbalance_curve(&ctx.cfg.device, grid)?;
        return Ok(ctx.finish(Report::from_table(&table), &["delta"]));
    }
    let m = &ctx.model;
    let mut report = Report::new([
        "delta",
        "delta0",
        "alpha_r_re",
        "alpha_r_im",
        "alpha_l_re",
        "alpha_l_im",
        "abs_alpha_r2",
        "abs_alpha_l2",
        "ratio_l_over_r",
        "photon_number",
        "b_static",
        "g_r_re",
        "g_r_im",
        "g_l_re",
        "g_l_im",
    ]);
    let ratio = if state.alpha_r.norm() > 0.0 {
        (state.alpha_l / state.alpha_r).norm()
    } else {
        f64::NAN
    };
    report.push(
        [
            state.delta,
            state.delta0,
            state.alpha_r.re,
            state.alpha_r.im,
            state.alpha_l.re,
            state.alpha_l.im,
            state.alpha_r.norm_sqr(),
            state.alpha_l.norm_sqr(),
            ratio,
            state.photon_number(),
            state.b_static,
            m.g_r.re,
            m.g_r.im,
            m.g_l.re,
            m.g_l.im,
        ]
        .map(Cell::from)
        .to_vec(),
    );
    Ok(ctx.finish(
        report,
        &["delta", "delta0", "g_r_re", "g_r_im", "g_l_re", "g_l_im"],
    ))
}

fn spectrum(ctx: &Context<'_>) -> Result<Report, CliError> {
    let grid = ctx.grid();
    let mut table = SweepTable::new([
        "delta", "abs_tR2", "abs_tL2", "tR_re", "tR_im", "tL_re", "tL_im",
    ]);
    let points: Vec<Result<(C64, C64), CliError>> = match ctx.cfg.options.model {
        ModelKind::Toy => {
            let toy = ctx.toy()?;
            grid.iter()
                .map(|&d| {
                    let t = toy.transmission(d);
                    Ok((t.t_r, t.t_l))
                })
                .collect()
        }
        ModelKind::Full => {
            let s = Scatterer::new(&ctx.model)?;
            grid.par_iter()
                .map(|&d| {
                    let p = s.at_detuning(d)?;
                    Ok((
                        p.transmission(Channel::Wg1Right),
                        p.transmission(Channel::Wg1Left),
                    ))
                })
                .collect()
        }
    };
    for (&d, p) in grid.iter().zip(points) {
        match p {
            Ok((r, l)) => table.push(vec![d, r.norm_sqr(), l.norm_sqr(), r.re, r.im, l.re, l.im]),
            Err(e) => table.push_flagged(&[d], e.message),
        }
    }
    let mut report = Report::from_table(&table);
    report.meta("model", ctx.cfg.options.model.to_string());
    Ok(ctx.finish(report, &["delta"]))
}

const PHASE_FLOOR: f64 = 1e-14;

fn phase(ctx: &Context<'_>) -> Result<Report, CliError> {
    let grid = ctx.grid();
    let mut table = SweepTable::new(["delta", "theta_R", "theta_L", "delta_theta"]);
    let points: Vec<Result<(f64, f64), String>> = match ctx.cfg.options.model {
        ModelKind::Toy => {
            let toy = ctx.toy()?;
            grid.iter()
                .map(|&d| {
                    toy.phase_shift(d)
                        .map(|p| (p.theta_r, p.theta_l))
                        .map_err(|e| e.to_string())
                })
                .collect()
        }
        ModelKind::Full => {
            let s = Scatterer::new(&ctx.model)?;
            grid.par_iter()
                .map(|&d| {
                    let p = s.at_detuning(d).map_err(|e| e.to_string())?;
                    let (r, l) = (
                        p.transmission(Channel::Wg1Right),
                        p.transmission(Channel::Wg1Left),
                    );
                    if r.norm() < PHASE_FLOOR || l.norm() < PHASE_FLOOR {
                        return Err(format!(
                            "phase undefined at delta = {d}: transmission vanishes"
                        ));
                    }
                    Ok((r.arg(), l.arg()))
                })
                .collect()
        }
    };
    for (&d, p) in grid.iter().zip(points) {
        match p {
            Ok((r, l)) => table.push(vec![d, r, l, principal(r - l)]),
            Err(e) => table.push_flagged(&[d], e),
        }
    }
    if ctx.cfg.options.unwrap {
        for c in ["theta_R", "theta_L", "delta_theta"] {
            table.unwrap_column(c);
        }
    }
    let mut report = Report::from_table(&table);
    report.meta("model", ctx.cfg.options.model.to_string());
    report.meta(
        "phases",
        if ctx.cfg.options.unwrap {
            "unwrapped"
        } else {
            "principal"
        },
    );
    Ok(ctx.finish(report, &["delta"]))
}

fn bandwidth_report(ctx: &Context<'_>, bw: &BandwidthResult) -> Report {
    let mut report = Report::new([
        "width",
        "delta_lo",
        "delta_hi",
        "center_contrast",
        "threshold",
        "diagnostic",
    ]);
    report.push(vec![
        bw.width.into(),
        bw.interval.0.into(),
        bw.interval.1.into(),
        bw.center_contrast.into(),
        bw.threshold.into(),
        bw.diagnostic.clone().unwrap_or_default().into(),
    ]);
    report.meta("model", ctx.cfg.options.model.to_string());
    ctx.finish(report, &["width", "delta_lo", "delta_hi"])
}

fn bandwidth(ctx: &Context<'_>) -> Result<Report, CliError> {
    let threshold = ctx.cfg.options.threshold;
    let bw = match ctx.cfg.options.model {
        ModelKind::Toy => toy_isolation_bandwidth(&ctx.toy()?, threshold)?,
        ModelKind::Full => isolation_bandwidth(&ctx.model, threshold)?,
    };
    Ok(bandwidth_report(ctx, &bw))
}

fn contour(ctx: &Context<'_>) -> Result<Report, CliError> {
    let o = &ctx.cfg.options;
    let (Some(betas), Some(gs)) = (&o.beta_grid, &o.g_r_grid) else {
        return Err(CliError::config(
            "task 'contour' needs options.beta and options.g_r grids",
        ));
    };
    let table = bandwidth_contour(&ctx.model, betas, gs, o.threshold);
    let mut report = Report::from_table(&table);
    report.meta("model", "full (G_L = 0)");
    Ok(ctx.finish(report, &["beta", "g_r", "width", "delta_lo", "delta_hi"]))
}

fn noise(ctx: &Context<'_>) -> Result<Report, CliError> {
    let o = &ctx.cfg.options;
    let Some(n_th) = o.n_th else {
        return Err(CliError::config("task 'noise' needs options.n_th"));
    };
    let m = &ctx.model;
    let center = o.center.unwrap_or(m.omega_m);
    let half_width = match o.half_width {
        Some(h) => h,
        None if m.kappa > 0.0 => m.g_r.norm_sqr() / m.kappa,
        None => return Err(CliError::config("options.half_width needed when kappa = 0")),
    };
    let band = Band::centered(center, half_width);
    let mut summary = noise_power(m, n_th, band)?;
    if let Some(wc) = ctx.cfg.device.omega_c {
        summary = summary.with_carrier(wc);
    }

    let fields = [
        ("band_lo", summary.band.lo),
        ("band_hi", summary.band.hi),
        ("n_th", summary.n_th),
        ("flux_exact", summary.flux_exact),
        ("flux_approx", summary.flux_approx),
        ("power_estimate", summary.power_estimate),
        ("n_noise_per_pulse", summary.n_noise_per_pulse),
        ("n_noise_per_pulse_approx", summary.n_noise_per_pulse_approx),
    ];
    let watts = summary
        .power_exact_watts
        .zip(summary.power_estimate_watts)
        .map(|(e, p)| [("power_exact_watts", e), ("power_estimate_watts", p)]);

    if o.density_points > 0 {
        let n = o.density_points;
        let omegas: Vec<f64> = (0..n)
            .map(|i| {
                if n == 1 {
                    center
                } else {
                    linspace_point(band.lo, band.hi, i, n)
                }
            })
            .collect();
        let rows: Vec<Result<(f64, f64), CliError>> = omegas
            .par_iter()
            .map(|&w| {
                Ok((
                    noise_spectral_density(m, n_th, w, NoiseMethod::Exact)?,
                    noise_spectral_density(m, n_th, w, NoiseMethod::Approx)?,
                ))
            })
            .collect();
        let mut table = SweepTable::new(["omega", "delta", "density_exact", "density_approx"]);
        for (&w, r) in omegas.iter().zip(rows) {
            match r {
                Ok((e, a)) => table.push(vec![w, w + m.delta, e, a]),
                Err(e) => table.push_flagged(&[w, w + m.delta], e.message),
            }
        }
        let mut report = Report::from_table(&table);
        for (k, v) in fields.iter().chain(watts.iter().flatten()) {
            let v = if k.starts_with("band") {
                v * ctx.out_scale
            } else {
                *v
            };
            report.meta(format!("noise.{k}"), format_number(v));
        }
        return Ok(ctx.finish(report, &["omega", "delta"]));
    }

    let all: Vec<(&str, f64)> = fields
        .iter()
        .chain(watts.iter().flatten())
        .copied()
        .collect();
    let mut report = Report::new(all.iter().map(|(k, _)| *k));
    report.push(all.iter().map(|&(_, v)| Cell::Num(v)).collect());
    Ok(ctx.finish(report, &["band_lo", "band_hi"]))
}

fn squeezing(ctx: &Context<'_>) -> Result<Report, CliError> {
    let m = &ctx.model;
    let sq = SqueezingModel::new(m.kappa, m.kappa_in, m.g_r, m.omega_m);
    let grid = ctx.grid();
    let mut table = SweepTable::new(["delta", "alpha_re", "alpha_im", "eta_re", "eta_im", "ratio"]);
    for &d in &grid {
        let row = sq
            .at_detuning(d)
            .and_then(|p| Ok((p, squeezing_ratio(&p)?)));
        match row {
            Ok((p, ratio)) => {
                table.push(vec![d, p.alpha.re, p.alpha.im, p.eta.re, p.eta.im, ratio])
            }
            Err(e) => table.push_flagged(&[d], e.to_string()),
        }
    }
    let mut report = Report::from_table(&table);
    let off_assumption = m.beta.norm() != 0.0
        || m.g_l.norm() != 0.0
        || m.kappa_prime != 0.0
        || (m.delta + m.omega_m).abs() > 1e-12 * m.omega_m.abs().max(1.0);
    if off_assumption {
        report.meta(
            "warning",
            "closed forms assume beta = 0, G_L = 0, kappa' = 0 and Delta = -omega_m; those are ignored here",
        );
    }
    Ok(ctx.finish(report, &["delta"]))
}

fn classify(ctx: &Context<'_>) -> Result<Report, CliError> {
    let c = classify_regime(&ctx.cfg.device, &ctx.model);
    let label = format!("{}, {}", c.coupling_regime, c.sideband);
    let mut report = Report::new([
        "label",
        "coupling_regime",
        "sideband",
        "port_regime",
        "abs_g_r",
        "kappa_t",
        "omega_m",
    ]);
    let slug = |s: String| s.replace(' ', "-");
    report.push(vec![
        label.into(),
        slug(match c.coupling_regime {
            CouplingRegime::Strong => "strong".into(),
            CouplingRegime::Weak => "weak".into(),
        })
        .into(),
        slug(match c.sideband {
            Sideband::Resolved => "resolved".into(),
            Sideband::Unresolved => "unresolved".into(),
        })
        .into(),
        slug(c.port_regime.to_string()).into(),
        ctx.model.g_r.norm().into(),
        ctx.model.kappa_t().into(),
        ctx.model.omega_m.into(),
    ]);
    Ok(ctx.finish(report, &["abs_g_r", "kappa_t", "omega_m"]))
}

/// Error of an oracle amplitude relative to `max(|solver|, 1)`, so vanishing
/// elements are compared in units of the drive.
pub fn oracle_error(oracle: C64, solver: C64) -> f64 {
    (oracle - solver).norm() / solver.norm().max(1.0)
}

/// Detuning, oracle amplitudes and solver amplitudes for one driven input.
type OraclePoint = (f64, [C64; 4], [C64; 4]);

fn verify(ctx: &Context<'_>) -> Result<Outcome, CliError> {
    let input = ctx.cfg.options.input;
    let tolerance = ctx.cfg.options.tolerance;
    let grid = ctx.cfg.delta_grid.clone().unwrap_or_else(|| {
        let k = ctx.model.kappa_t();
        vec![-2.0 * k, -0.5 * k, 0.0, 1.5 * k]
    });
    let scatterer = Scatterer::new(&ctx.model)?;
    let runs: Vec<Result<OraclePoint, CliError>> = grid
        .par_iter()
        .map(|&d| {
            let run = TimeDomainRun::new(&ctx.model, Probe::new(input, d));
            let oracle = time_domain_response(&run)?;
            let s = scatterer.at_detuning(d)?;
            Ok((d, oracle.amplitudes, Channel::ALL.map(|o| s.get(o, input))))
        })
        .collect();
    let mut report = Report::new([
        "input",
        "output",
        "delta",
        "oracle_re",
        "oracle_im",
        "solver_re",
        "solver_im",
        "error",
        "pass",
    ]);
    let mut worst: f64 = 0.0;
    for r in runs {
        let (d, oracle, solver) = r?;
        for out in Channel::ALL {
            let (o, s) = (oracle[out.index()], solver[out.index()]);
            let err = oracle_error(o, s);
            worst = worst.max(err);
            report.push(vec![
                input.to_string().into(),
                out.to_string().into(),
                d.into(),
                o.re.into(),
                o.im.into(),
                s.re.into(),
                s.im.into(),
                err.into(),
                (if err < tolerance { "pass" } else { "fail" }).into(),
            ]);
        }
    }
    report.meta("verify.tolerance", format_number(tolerance));
    report.meta("verify.max_error", format_number(worst));
    let failure = (worst >= tolerance).then(|| {
        CliError::numerical(format!(
            "oracle disagrees with solver: max error {} >= tolerance {}",
            format_number(worst),
            format_number(tolerance)
        ))
    });
    Ok(Outcome {
        report: ctx.finish(report, &["delta"]),
        failure,
    })
}
