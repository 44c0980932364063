use thiserror::Error;

/// Errors produced by mesh construction, the linear algebra kernel, the
/// forward solver, and the verification / detection pipeline.
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("mesh generation failed: {0}")]
    MeshGeneration(String),

    #[error("electrode layout rejected: {0}")]
    ElectrodeLayout(String),

    #[error("mesh too coarse to resolve electrode arcs: {0}")]
    MeshTooCoarse(String),

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not positive definite (nonpositive pivot at index {0})")]
    NotPositiveDefinite(usize),

    #[error("linear solve failed: {0}")]
    SolveFailed(String),

    #[error("matrix is not symmetric: max deviation {deviation:e} exceeds tolerance {tolerance:e}")]
    NotSymmetric { deviation: f64, tolerance: f64 },

    #[error("eigenvalue iteration did not converge: {0}")]
    EigenNoConvergence(String),

    #[error("invalid conductivity field: {0}")]
    InvalidConductivity(String),

    #[error("invalid contact impedances: {0}")]
    InvalidImpedance(String),

    #[error("empty region: {0}")]
    EmptyRegion(String),

    #[error("setting assumptions violated:\n{}", .0.join("\n"))]
    SettingViolations(Vec<String>),

    #[error("sigma_max is required for the linearized more-conductive test but was not provided")]
    MissingSigmaMax,

    #[error("region of interest conflicts with the partition: {0}")]
    RoiOverlap(String),

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("ordering precondition violated: {0}")]
    OrderingViolated(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("measurement data rejected: {0}")]
    MeasurementFormat(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
