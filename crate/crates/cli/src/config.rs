//! Run configuration: TOML schema, unit handling and resolution into core
//! types.
//!
//! In `kappa` mode every rate is a plain number in units of a common
//! reference rate. In `hz` mode rates are cyclic frequencies, either plain
//! numbers in Hz or strings such as `"11.4 MHz"`, and are converted to
//! angular frequency internally.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use omring_core::analysis::DEFAULT_THRESHOLD;
use omring_core::model::DeviceParams;
use omring_core::{Channel, C64};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitMode {
    Kappa,
    Hz,
}

impl UnitMode {
    /// Multiplier taking a user-facing frequency to the internal one.
    pub fn to_internal(self) -> f64 {
        match self {
            UnitMode::Kappa => 1.0,
            UnitMode::Hz => TAU,
        }
    }
}

impl fmt::Display for UnitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitMode::Kappa => "kappa",
            UnitMode::Hz => "hz",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Pump,
    Spectrum,
    Phase,
    Bandwidth,
    Contour,
    Noise,
    Squeezing,
    Classify,
    Verify,
}

impl Task {
    pub const ALL: [Task; 9] = [
        Task::Pump,
        Task::Spectrum,
        Task::Phase,
        Task::Bandwidth,
        Task::Contour,
        Task::Noise,
        Task::Squeezing,
        Task::Classify,
        Task::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Pump => "pump",
            Task::Spectrum => "spectrum",
            Task::Phase => "phase",
            Task::Bandwidth => "bandwidth",
            Task::Contour => "contour",
            Task::Noise => "noise",
            Task::Squeezing => "squeezing",
            Task::Classify => "classify",
            Task::Verify => "verify",
        }
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown task '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Closed-form rotating-wave transmission.
    Toy,
    /// Full linearized scattering solution.
    Full,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Toy => "toy",
            ModelKind::Full => "full",
        })
    }
}

// ---- raw schema ----------------------------------------------------------

/// A number, or in Hz mode a string with a frequency suffix.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ComplexQuantity {
    Real(Quantity),
    Pair([Quantity; 2]),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ComplexNumber {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexNumber {
    fn value(&self) -> C64 {
        match *self {
            ComplexNumber::Real(x) => C64::new(x, 0.0),
            ComplexNumber::Pair([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Linear {
        start: Quantity,
        stop: Quantity,
        points: usize,
    },
    List(Vec<Quantity>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDevice {
    omega_m: Quantity,
    kappa: Quantity,
    #[serde(default)]
    kappa_prime: Option<Quantity>,
    #[serde(default)]
    kappa_in: Option<Quantity>,
    #[serde(default)]
    gamma_m: Option<Quantity>,
    #[serde(default)]
    g0: Option<Quantity>,
    #[serde(default)]
    beta: Option<ComplexQuantity>,
    #[serde(default)]
    delta0: Option<Quantity>,
    #[serde(default)]
    omega_c: Option<Quantity>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoupling {
    g_r: ComplexQuantity,
    #[serde(default)]
    g_l: Option<ComplexQuantity>,
    #[serde(default)]
    delta: Option<Quantity>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetuningMode {
    /// `delta0` is the bare detuning; the shift is solved self-consistently.
    Bare,
    /// `delta0` is already the effective detuning.
    Shifted,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum LeftDrive {
    Value(ComplexNumber),
    Keyword(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPump {
    drive_right: ComplexNumber,
    #[serde(default)]
    drive_left: Option<LeftDrive>,
    #[serde(default)]
    detuning: Option<DetuningMode>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    model: Option<ModelKind>,
    unwrap: Option<bool>,
    threshold: Option<f64>,
    beta: Option<GridSpec>,
    g_r: Option<GridSpec>,
    n_th: Option<f64>,
    center: Option<Quantity>,
    half_width: Option<Quantity>,
    density_points: Option<usize>,
    input: Option<String>,
    tolerance: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    units: UnitMode,
    #[serde(default)]
    task: Option<Task>,
    device: RawDevice,
    #[serde(default)]
    coupling: Option<RawCoupling>,
    #[serde(default)]
    pump: Option<RawPump>,
    #[serde(default)]
    grid: Option<RawGrid>,
    #[serde(default)]
    options: RawOptions,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    delta: GridSpec,
}

// ---- resolved ------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum OperatingPoint {
    /// Linearized couplings given directly.
    Coupling { g_r: C64, g_l: C64, delta: f64 },
    Pump {
        drive_right: C64,
        /// `None` requests the drive that cancels the left-circulating pump.
        drive_left: Option<C64>,
        detuning: DetuningMode,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub units: UnitMode,
    pub task: Option<Task>,
    /// Device parameters in internal (angular) units.
    pub device: DeviceParams,
    pub operating_point: OperatingPoint,
    /// Probe detuning grid, internal units.
    pub delta_grid: Option<Vec<f64>>,
    pub options: Options,
    /// `key = value` pairs as written, for the output header.
    pub echo: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub model: ModelKind,
    pub unwrap: bool,
    pub threshold: f64,
    pub beta_grid: Option<Vec<f64>>,
    pub g_r_grid: Option<Vec<f64>>,
    pub n_th: Option<f64>,
    pub center: Option<f64>,
    pub half_width: Option<f64>,
    pub density_points: usize,
    pub input: Channel,
    pub tolerance: f64,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::config(msg)
}

fn parse_suffixed(text: &str, name: &str) -> Result<f64, CliError> {
    let t = text.trim();
    let split = t
        .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        .unwrap_or(t.len());
    let (num, unit) = t.split_at(split);
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| config_err(format!("{name}: cannot parse number in '{text}'")))?;
    let scale = match unit.trim() {
        "" | "Hz" => 1.0,
        "kHz" => 1e3,
        "MHz" => 1e6,
        "GHz" => 1e9,
        "THz" => 1e12,
        other => return Err(config_err(format!("{name}: unknown unit '{other}'"))),
    };
    Ok(value * scale)
}

struct Resolver {
    units: UnitMode,
}

impl Resolver {
    fn freq(&self, q: &Quantity, name: &str) -> Result<f64, CliError> {
        let raw = match (q, self.units) {
            (Quantity::Number(x), _) => *x,
            (Quantity::Text(s), UnitMode::Hz) => parse_suffixed(s, name)?,
            (Quantity::Text(s), UnitMode::Kappa) => {
                return Err(config_err(format!(
                    "{name}: '{s}' has a unit suffix, which needs units = \"hz\""
                )))
            }
        };
        if !raw.is_finite() {
            return Err(config_err(format!("{name}: must be finite")));
        }
        Ok(raw * self.units.to_internal())
    }

    fn opt_freq(&self, q: &Option<Quantity>, name: &str, default: f64) -> Result<f64, CliError> {
        q.as_ref().map_or(Ok(default), |q| self.freq(q, name))
    }

    fn complex(&self, q: &ComplexQuantity, name: &str) -> Result<C64, CliError> {
        match q {
            ComplexQuantity::Real(x) => Ok(C64::new(self.freq(x, name)?, 0.0)),
            ComplexQuantity::Pair([re, im]) => {
                Ok(C64::new(self.freq(re, name)?, self.freq(im, name)?))
            }
        }
    }

    fn grid(&self, g: &GridSpec, name: &str) -> Result<Vec<f64>, CliError> {
        match g {
            GridSpec::Linear {
                start,
                stop,
                points,
            } => {
                let (a, b) = (self.freq(start, name)?, self.freq(stop, name)?);
                match *points {
                    0 => Err(config_err(format!("{name}: points must be >= 1"))),
                    1 => Ok(vec![a]),
                    n => Ok((0..n).map(|i| linspace_point(a, b, i, n)).collect()),
                }
            }
            GridSpec::List(values) => values.iter().map(|q| self.freq(q, name)).collect(),
        }
    }
}

/// `i`-th of `n` evenly spaced points on `[a, b]`; exact for integer
/// endpoints whenever the point itself is representable.
pub fn linspace_point(a: f64, b: f64, i: usize, n: usize) -> f64 {
    let m = (n - 1) as f64;
    (a * (m - i as f64) + b * i as f64) / m
}

fn quantity_text(q: &Quantity) -> String {
    match q {
        Quantity::Number(x) => format!("{x}"),
        Quantity::Text(s) => s.clone(),
    }
}

fn complex_text(q: &ComplexQuantity) -> String {
    match q {
        ComplexQuantity::Real(x) => quantity_text(x),
        ComplexQuantity::Pair([re, im]) => {
            format!("[{}, {}]", quantity_text(re), quantity_text(im))
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| config_err(e.message().to_string()))?;
        let r = Resolver { units: raw.units };
        let d = &raw.device;
        let mut echo = vec![("units".to_string(), raw.units.to_string())];
        let mut note = |k: &str, v: String| echo.push((k.to_string(), v));

        let omega_m = r.freq(&d.omega_m, "device.omega_m")?;
        note("device.omega_m", quantity_text(&d.omega_m));
        let kappa = r.freq(&d.kappa, "device.kappa")?;
        note("device.kappa", quantity_text(&d.kappa));
        let mut device = DeviceParams::new(omega_m, kappa)
            .with_kappa_prime(r.opt_freq(&d.kappa_prime, "device.kappa_prime", 0.0)?)
            .with_kappa_in(r.opt_freq(&d.kappa_in, "device.kappa_in", 0.0)?)
            .with_gamma_m(r.opt_freq(&d.gamma_m, "device.gamma_m", 0.0)?)
            .with_g0(r.opt_freq(&d.g0, "device.g0", 0.0)?)
            .with_delta0(r.opt_freq(&d.delta0, "device.delta0", -omega_m)?);
        for (k, v) in [
            ("device.kappa_prime", &d.kappa_prime),
            ("device.kappa_in", &d.kappa_in),
            ("device.gamma_m", &d.gamma_m),
            ("device.g0", &d.g0),
            ("device.delta0", &d.delta0),
        ] {
            if let Some(v) = v {
                note(k, quantity_text(v));
            }
        }
        if let Some(beta) = &d.beta {
            device = device.with_beta(r.complex(beta, "device.beta")?);
            note("device.beta", complex_text(beta));
        }
        if let Some(wc) = &d.omega_c {
            if raw.units != UnitMode::Hz {
                return Err(config_err(
                    "device.omega_c: an optical carrier needs units = \"hz\"",
                ));
            }
            device = device.with_omega_c(r.freq(wc, "device.omega_c")?);
            note("device.omega_c", quantity_text(wc));
        }
        device
            .validate()
            .map_err(|e| config_err(format!("device: {e}")))?;

        let operating_point = match (&raw.coupling, &raw.pump) {
            (Some(_), Some(_)) => {
                return Err(config_err(
                    "[coupling] and [pump] are mutually exclusive; give one",
                ))
            }
            (None, None) => return Err(config_err("need one of [coupling] or [pump]")),
            (Some(c), None) => {
                note("coupling.g_r", complex_text(&c.g_r));
                if let Some(g_l) = &c.g_l {
                    note("coupling.g_l", complex_text(g_l));
                }
                if let Some(delta) = &c.delta {
                    note("coupling.delta", quantity_text(delta));
                }
                OperatingPoint::Coupling {
                    g_r: r.complex(&c.g_r, "coupling.g_r")?,
                    g_l: c
                        .g_l
                        .as_ref()
                        .map_or(Ok(C64::new(0.0, 0.0)), |g| r.complex(g, "coupling.g_l"))?,
                    delta: r.opt_freq(&c.delta, "coupling.delta", -omega_m)?,
                }
            }
            (None, Some(p)) => {
                let drive_right = p.drive_right.value();
                note("pump.drive_right", format!("{drive_right}"));
                let drive_left = match &p.drive_left {
                    None => Some(C64::new(0.0, 0.0)),
                    Some(LeftDrive::Value(v)) => Some(v.value()),
                    Some(LeftDrive::Keyword(k)) if k == "cancel" => None,
                    Some(LeftDrive::Keyword(k)) => {
                        return Err(config_err(format!(
                            "pump.drive_left: expected a number, [re, im] or \"cancel\", got '{k}'"
                        )))
                    }
                };
                note(
                    "pump.drive_left",
                    drive_left.map_or("cancel".to_string(), |v| format!("{v}")),
                );
                let detuning = p.detuning.unwrap_or(DetuningMode::Bare);
                note(
                    "pump.detuning",
                    match detuning {
                        DetuningMode::Bare => "bare",
                        DetuningMode::Shifted => "shifted",
                    }
                    .to_string(),
                );
                for (name, v) in [
                    ("pump.drive_right", Some(drive_right)),
                    ("pump.drive_left", drive_left),
                ] {
                    if let Some(v) = v {
                        if !(v.re.is_finite() && v.im.is_finite()) {
                            return Err(config_err(format!("{name}: must be finite")));
                        }
                    }
                }
                OperatingPoint::Pump {
                    drive_right,
                    drive_left,
                    detuning,
                }
            }
        };

        let delta_grid = match &raw.grid {
            Some(g) => {
                let grid = r.grid(&g.delta, "grid.delta")?;
                note("grid.delta", format!("{} points", grid.len()));
                Some(grid)
            }
            None => None,
        };

        let o = &raw.options;
        let threshold = o.threshold.unwrap_or(DEFAULT_THRESHOLD);
        if !threshold.is_finite() {
            return Err(config_err("options.threshold: must be finite"));
        }
        if let Some(n) = o.n_th {
            if !(n.is_finite() && n >= 0.0) {
                return Err(config_err("options.n_th: must be finite and >= 0"));
            }
        }
        let tolerance = o.tolerance.unwrap_or(1e-6);
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(config_err("options.tolerance: must be > 0"));
        }
        let input = match &o.input {
            Some(s) => s
                .parse::<Channel>()
                .map_err(|e| config_err(format!("options.input: {e}")))?,
            None => Channel::Wg1Right,
        };
        let half_width = o
            .half_width
            .as_ref()
            .map(|q| r.freq(q, "options.half_width"))
            .transpose()?;
        if half_width.is_some_and(|h| h < 0.0) {
            return Err(config_err("options.half_width: must be >= 0"));
        }
        let options = Options {
            model: o.model.unwrap_or(ModelKind::Full),
            unwrap: o.unwrap.unwrap_or(false),
            threshold,
            beta_grid: o
                .beta
                .as_ref()
                .map(|g| r.grid(g, "options.beta"))
                .transpose()?,
            g_r_grid: o
                .g_r
                .as_ref()
                .map(|g| r.grid(g, "options.g_r"))
                .transpose()?,
            n_th: o.n_th,
            center: o
                .center
                .as_ref()
                .map(|q| r.freq(q, "options.center"))
                .transpose()?,
            half_width,
            density_points: o.density_points.unwrap_or(0),
            input,
            tolerance,
        };
        for (k, v) in [
            ("options.model", o.model.map(|m| m.to_string())),
            ("options.unwrap", o.unwrap.map(|u| u.to_string())),
            ("options.n_th", o.n_th.map(|n| n.to_string())),
            ("options.center", o.center.as_ref().map(quantity_text)),
            (
                "options.half_width",
                o.half_width.as_ref().map(quantity_text),
            ),
            (
                "options.density_points",
                o.density_points.map(|n| n.to_string()),
            ),
            ("options.input", o.input.clone()),
            ("options.tolerance", o.tolerance.map(|t| t.to_string())),
        ] {
            if let Some(v) = v {
                note(k, v);
            }
        }

        Ok(Self {
            units: raw.units,
            task: raw.task,
            device,
            operating_point,
            delta_grid,
            options,
            echo,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
units = "kappa"
[device]
omega_m = 20
kappa = 1
kappa_in = 1
[coupling]
g_r = 5
"#;

    #[test]
    fn minimal_config_resolves_defaults() {
        let c = RunConfig::from_toml(BASE).unwrap();
        assert_eq!(c.device.delta0, -20.0);
        assert_eq!(
            c.operating_point,
            OperatingPoint::Coupling {
                g_r: C64::new(5.0, 0.0),
                g_l: C64::new(0.0, 0.0),
                delta: -20.0
            }
        );
        assert_eq!(c.options.threshold, 0.5);
        assert_eq!(c.options.model, ModelKind::Full);
    }

    #[test]
    fn hz_suffixes_convert_to_angular() {
        let c = RunConfig::from_toml(
            r#"
units = "hz"
[device]
omega_m = "78 MHz"
kappa = "7.1MHz"
g0 = 3.4e3
[coupling]
g_r = "11.4 MHz"
"#,
        )
        .unwrap();
        assert!((c.device.omega_m - TAU * 78e6).abs() < 1e-3);
        assert!((c.device.kappa - TAU * 7.1e6).abs() < 1e-3);
        assert!((c.device.g0 - TAU * 3.4e3).abs() < 1e-9);
    }

    #[test]
    fn suffix_rejected_in_kappa_mode() {
        let text = BASE.replace("omega_m = 20", "omega_m = \"20 MHz\"");
        assert_eq!(RunConfig::from_toml(&text).unwrap_err().code, 2);
    }

    #[test]
    fn negative_rate_is_config_error() {
        let text = BASE.replace("kappa = 1", "kappa = -1");
        assert_eq!(RunConfig::from_toml(&text).unwrap_err().code, 2);
    }

    #[test]
    fn coupling_and_pump_exclusive() {
        let text = format!("{BASE}[pump]\ndrive_right = 1\n");
        assert_eq!(RunConfig::from_toml(&text).unwrap_err().code, 2);
    }

    #[test]
    fn unit_mode_required() {
        let text = BASE.replace("units = \"kappa\"", "");
        assert_eq!(RunConfig::from_toml(&text).unwrap_err().code, 2);
    }

    #[test]
    fn grids() {
        let text = format!("{BASE}[grid]\ndelta = {{ start = -1, stop = 1, points = 5 }}\n");
        let c = RunConfig::from_toml(&text).unwrap();
        assert_eq!(c.delta_grid.unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let text = format!("{BASE}[grid]\ndelta = [0, 2.5]\n");
        assert_eq!(
            RunConfig::from_toml(&text).unwrap().delta_grid.unwrap(),
            vec![0.0, 2.5]
        );
    }

    #[test]
    fn pump_cancel_keyword() {
        let text = BASE.replace(
            "[coupling]\ng_r = 5",
            "[pump]\ndrive_right = 10\ndrive_left = \"cancel\"",
        );
        let c = RunConfig::from_toml(&text).unwrap();
        assert!(matches!(
            c.operating_point,
            OperatingPoint::Pump {
                drive_left: None,
                detuning: DetuningMode::Bare,
                ..
            }
        ));
    }
}
