use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed rational {0:?}")]
    MalformedRational(String),

    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("time {t} outside resolvable window [{t_min}, {t_max}]")]
    OutsideWindow { t: f64, t_min: f64, t_max: f64 },

    #[error("integrability violated: exponent {exponent} <= -1 in {what}")]
    NotIntegrable { what: &'static str, exponent: f64 },

    #[error("arity mismatch: form expects {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("exponent conditions violated: {0}")]
    Inadmissible(String),

    #[error("iterate diverged at sweep {sweep}: {reason}")]
    Diverged { sweep: usize, reason: String },

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("bad file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
