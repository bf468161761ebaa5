use thiserror::Error;

/// Errors for kernel, solver and harness operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0} outside the domain [0, 1]")]
    PointOutOfDomain(f64),

    #[error("empty design: at least one sample point is required")]
    EmptyDesign,

    #[error("eigenfunction index {index} out of range 1..={truncation}")]
    IndexOutOfRange { index: usize, truncation: usize },

    #[error("singular system: nonpositive pivot {value:e} at index {pivot}")]
    SingularSystem { pivot: usize, value: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown target `{0}` (expected cos2pi | sin2pi | sin3pi2 | source:s=<float>)")]
    UnknownTarget(String),

    #[error("unknown kernel `{0}` (expected min | spectral:beta=<float>,M=<int>)")]
    UnknownKernel(String),

    #[error("smoothness undefined: all coefficients below threshold")]
    UndefinedSmoothness,

    #[error("need at least 50 nonzero coefficients for a smoothness fit, found {0}")]
    InsufficientCoefficients(usize),

    #[error("quadrature too coarse: {nodes} nodes, need at least {required} for n = {n}")]
    QuadratureTooCoarse {
        nodes: usize,
        required: usize,
        n: usize,
    },

    #[error("rate fit needs at least 3 usable points, found {usable} ({excluded} excluded)")]
    NotEnoughPoints { usable: usize, excluded: usize },

    #[error("trial curves do not share the same n-grid")]
    MismatchedGrids,

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
