use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("pump detuning self-consistency did not converge after {iterations} iterations (last relative step {residual:.3e})")]
    PumpNotConverged { iterations: usize, residual: f64 },

    #[error("pump steady state is singular: (i*Delta - kappa_t)^2 + |beta|^2 = 0")]
    SingularPump,

    #[error("linearized model is unstable (min Re eigenvalue of M = {margin:.6e})")]
    Unstable { margin: f64 },

    #[error("(-M + i*omega) is numerically singular at omega = {omega} (condition number {condition:.3e})")]
    SingularResponse { omega: f64, condition: f64 },

    #[error("transmission amplitude vanishes; phase undefined at delta = {delta}")]
    UndefinedPhase { delta: f64 },

    #[error("closed-form denominator vanishes at omega = {omega}")]
    DegenerateDenominator { omega: f64 },

    #[error("quadrature did not reach tolerance: estimated error {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNotConverged { achieved: f64, requested: f64 },

    #[error(
        "time-domain run did not settle: relative drift of the projected amplitude {drift:.3e}"
    )]
    NotSettled { drift: f64 },

    #[error("time-domain run diverged at t = {time} (norm {norm:.3e})")]
    Diverged { time: f64, norm: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
