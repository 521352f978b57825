use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max|M - M^H| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not anti-Hermitian: max|M + M^H| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotAntiHermitian { deviation: f64, tolerance: f64 },

    #[error("linear algebra backend failure: {0}")]
    Backend(String),

    #[error("dimension {dim} exceeds dense guard {max}")]
    DenseGuard { dim: usize, max: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("window [{lo}, {hi}] out of range for chain of {n} sites")]
    WindowOutOfRange { lo: usize, hi: usize, n: usize },

    #[error("patch window touches a chain end (window [{lo}, {hi}], chain 1..={n})")]
    PatchTouchesEnd { lo: usize, hi: usize, n: usize },

    #[error("requested {keep} kept states but bond {bond} has dimension {dim}")]
    KeepExceedsBond { keep: usize, bond: usize, dim: usize },

    #[error("solver did not converge: {0}")]
    NotConverged(String),

    #[error("SDP reported {status}: {detail}")]
    SdpFailure { status: String, detail: String },

    #[error("degenerate generator set: {discarded} of {total} generators had zero projected norm")]
    DegenerateGenerators { discarded: usize, total: usize },

    #[error("model is not frustration-free: ground energy {e0:.3e} above layer threshold")]
    NotFrustrationFree { e0: f64 },

    #[error("insufficient data points for fit: got {got}, need {need}")]
    InsufficientData { got: usize, need: usize },

    #[error("unreliable estimate: {0}")]
    Unreliable(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("file format error: {0}")]
    Format(String),
}
