use thiserror::Error;

/// Errors raised by geometry, verification, flow and field operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CmsError {
    #[error("singular embedding: metric determinant {det:e} at or below floor {floor:e}")]
    SingularEmbedding { det: f64, floor: f64 },

    #[error("mesh quality: {0}")]
    MeshQuality(String),

    #[error("topology: {0}")]
    Topology(String),

    #[error("topology violation: Euler characteristic changed from {before} to {after}")]
    TopologyViolation { before: i64, after: i64 },

    #[error("orientation: {0}")]
    Orientation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("step collapse: time step {dt:e} below {floor:e}")]
    StepCollapse { dt: f64, floor: f64 },

    #[error("negative density {value:e} at sample {index} after step")]
    NegativeDensity { index: usize, value: f64 },

    #[error("time stencil: {0}")]
    Stencil(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for CmsError {
    fn from(err: std::io::Error) -> Self {
        CmsError::Io(err.to_string())
    }
}

pub type Result<T, E = CmsError> = std::result::Result<T, E>;
