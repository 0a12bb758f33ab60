use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("matrix is not unitary (max deviation of U^dagger U from I is {0:e})")]
    NotUnitary(f64),

    #[error("entries length {got} does not match {rows}x{cols}")]
    InvalidData {
        rows: usize,
        cols: usize,
        got: usize,
    },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NotFinite { row: usize, col: usize },

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("Schatten exponent must satisfy p >= 1, got {0}")]
    InvalidP(f64),

    #[error("empty input")]
    EmptyInput,

    #[error("value {value} outside of [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("basis columns are not orthonormal (deviation {0:e})")]
    NotAFace(f64),

    #[error("generators {0} and {1} do not commute (commutator norm {2:e})")]
    NotCommuting(usize, usize, f64),

    #[error("no generators given")]
    EmptyGenerators,

    #[error("cannot parse Pauli string at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("Pauli strings have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("operator on {0} qubits is too large to materialize densely")]
    TooLarge(usize),

    #[error("invalid search angles: {0}")]
    InvalidAngles(String),

    #[error(
        "no step count within one period reaches epsilon; best k = {best_k} achieves {achieved}"
    )]
    Unreachable { best_k: u64, achieved: f64 },

    #[error("malformed matrix JSON: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dims(expected: impl ToString, got: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }
}
