use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("chart mismatch: ({left}) vs ({right})")]
    ChartMismatch { left: String, right: String },

    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degree mismatch: expected degree {expected}, got {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("cannot contract a degree-0 form")]
    ContractScalar,

    #[error("arity mismatch: degree-{degree} object applied to {given} arguments")]
    ArityMismatch { degree: usize, given: usize },

    #[error("operation needs a chart with {expected} coordinates, got {found}")]
    WrongChartSize { expected: usize, found: usize },

    #[error("determinant `{0}` is not constant; unsupported inversion")]
    NonConstantDeterminant(String),

    #[error("degenerate 2-form: determinant is zero")]
    DegenerateForm,

    #[error("invalid magnetic field: {0}")]
    InvalidMagneticField(String),

    #[error("structure constants not antisymmetric: c[{k}][{i}][{j}] != -c[{k}][{j}][{i}]")]
    NotAntisymmetric { k: usize, i: usize, j: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite state encountered at t = {time}")]
    NonFinite { time: f64 },

    #[error("no closed orbit found up to t = {max_time}")]
    NoPeriod { max_time: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("lifted bracket disagrees with the phase-space bracket: {0}")]
    ReductionMismatch(String),
}
