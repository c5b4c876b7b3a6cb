use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Parameters or states outside the domain where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A closed-form expression is singular for these parameters.
    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    /// The coexistence equilibrium does not exist for these parameters.
    #[error("coexistence equilibrium infeasible: {0}")]
    Infeasible(String),

    #[error("integrator step size underflow at t = {t} (h = {step:e})")]
    StepFailure { t: f64, step: f64 },

    #[error("integrator exceeded {0} steps")]
    TooManySteps(usize),

    #[error("trajectory too short to classify: {0}")]
    InsufficientSpan(String),

    #[error("no sign change of a1*a2 - a3 on [{lo}, {hi}] (values {f_lo:e}, {f_hi:e})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// The stability crossing is not through a complex-conjugate pair.
    #[error("crossing at A = {0} is not a Hopf point: eigenvalue pair is real")]
    RealCrossing(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
