use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("dimension mismatch: vector has dim {vector}, params expect n={params}")]
    DimensionMismatch { vector: usize, params: usize },

    #[error("index {index} out of range [1, {max}]")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("value {value} exceeds category bound {max}")]
    ValueOutOfRange { value: u32, max: u32 },

    #[error("sketch mismatch: d {d_left} vs {d_right}, p {p_left} vs {p_right}")]
    SketchMismatch {
        d_left: usize,
        d_right: usize,
        p_left: u64,
        p_right: u64,
    },

    #[error("median sketch arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("median sketch rows built under different params")]
    ParamsMismatch,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("bad sketch file: {0}")]
    BadSketchFile(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("{0}")]
    Eval(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
