use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Process exit codes shared by the CLI and the C ABI.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VALIDATION: i32 = 2;
    pub const INADMISSIBLE: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing parameter `{0}`")]
    MissingKey(String),

    #[error("unknown parameter `{0}`")]
    UnknownKey(String),

    #[error("parameter `{0}` given more than once")]
    DuplicateKey(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("parameter `{name}` = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },

    #[error("Lambda = (mu+gamma)(mu+sigma) - q*gamma*sigma = {0} is not positive; R0 is undefined")]
    NonPositiveLambda(f64),

    #[error("sensitivity of R0 to `{0}` is not supported")]
    UnsupportedParameter(String),

    #[error("perturbed parameter set is inadmissible: {0}")]
    InadmissiblePerturbation(String),

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("zero eigenvalue of the Jacobian at the bifurcation point is not simple (second singular value {0:e})")]
    NoNullVector(f64),

    #[error("step size underflow at t = {t}: h = {h:e}")]
    StepUnderflow { t: f64, h: f64 },

    #[error("maximum number of steps ({0}) exceeded")]
    MaxStepsExceeded(u64),

    #[error("component {component} went negative ({value:e}) at t = {t}, beyond the clamping band")]
    NegativeExcursion { t: f64, component: usize, value: f64 },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonPositiveLambda(_) | Error::NoNullVector(_) | Error::InadmissiblePerturbation(_) => {
                exit::INADMISSIBLE
            }
            Error::NoConvergence
            | Error::StepUnderflow { .. }
            | Error::MaxStepsExceeded(_)
            | Error::NegativeExcursion { .. } => exit::NUMERICAL,
            _ => exit::VALIDATION,
        }
    }
}
