use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),

    #[error("exact evaluation at t = {0} is transcendental; use the bigfloat backend")]
    TranscendentalEvaluation(String),

    #[error("concatenation requires u1(0) = u2(0), got {left} and {right}")]
    Match { left: String, right: String },

    #[error("constant polynomial: the decision requires a nonconstant operator")]
    ConstantPolynomial,

    #[error("t-degree is zero")]
    TDegreeZero,

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("polynomial does not split over the Gaussian rationals")]
    ExactFactorizationUnavailable,

    #[error("root iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize, dump: Vec<String> },

    #[error(
        "quadrature did not converge: error estimate {estimate:e} above tolerance {tolerance:e} after {nodes} nodes"
    )]
    QuadratureFailed {
        estimate: f64,
        tolerance: f64,
        nodes: usize,
    },

    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("exponent overflow at {position}")]
    ExponentOverflow { position: usize },

    #[error("unknown identifier `{name}` at {position}")]
    UnknownIdentifier { name: String, position: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
