use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("axis {axis} out of range for dimension {dimension}")]
    AxisOutOfRange { axis: usize, dimension: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid dimension {0}: need n >= 2")]
    InvalidDimension(usize),

    #[error("invalid distortion constant K = {0}: need K >= 1")]
    InvalidDistortion(f64),

    #[error("linear map matrix is rank deficient")]
    RankDeficient,

    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NonSymmetric(f64),

    #[error("Jacobian determinant {0:e} is not positive; orientation-reversing or singular point")]
    Orientation(f64),

    #[error("degenerate point: minimal stretch {0:e}")]
    DegeneratePoint(f64),

    #[error("no admissible sample points ({sampled} sampled, all excluded)")]
    NoData { sampled: usize },

    #[error("|u(x)| = {modulus:e} is within the zero-exclusion radius; x lies outside Omega_0")]
    ZeroModulus { modulus: f64 },

    #[error("Du(x) vanishes at the point")]
    ZeroDifferential,

    #[error("no witness required: q = {q} is outside the open gap ({q_minus}, {q_plus})")]
    NoWitnessRequired { q: f64, q_minus: f64, q_plus: f64 },

    #[error("q = 0 gives the constant function |u|^0 = 1, which is subharmonic")]
    TriviallySubharmonic,

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("component u{} is not harmonic: Laplacian has coefficient {coefficient} at exponents {exps:?}", .component + 1)]
    NotHarmonic {
        component: usize,
        exps: Vec<u32>,
        coefficient: String,
    },

    #[error("invalid map description: {0}")]
    Schema(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
