use thiserror::Error;

/// Errors produced by the structforge pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("xml parse error at line {line}, column {column}: {message}")]
    Xml {
        line: u32,
        column: u32,
        message: String,
    },

    #[error("invalid level at line {line}: attribute `{attribute}`: {message}")]
    Validation {
        line: u32,
        attribute: String,
        message: String,
    },

    #[error("structure is empty")]
    EmptyStructure,

    #[error("structure needs {required_width}x{required_height} cells but the grid is {grid_width}x{grid_height}")]
    Capacity {
        required_width: usize,
        required_height: usize,
        grid_width: usize,
        grid_height: usize,
    },

    #[error("invalid generator parameters: {0}")]
    Params(String),

    #[error(
        "overlap adjustment did not converge after {sweeps} sweeps; offending pairs: {pairs:?}"
    )]
    Adjustment {
        sweeps: usize,
        pairs: Vec<(usize, usize)>,
    },

    #[error("tensor format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
