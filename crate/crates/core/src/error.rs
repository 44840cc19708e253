use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("CFL condition violated: tau/h = {ratio:.4} exceeds {limit:.4}")]
    Cfl { ratio: f64, limit: f64 },

    #[error("forward solution blew up (non-finite value) at time step {step}")]
    BlowUp { step: usize },

    #[error("collocation matrix is numerically singular (condition estimate {condition:.3e}); try a different shape parameter")]
    Singular { condition: f64 },

    #[error("Green's function for n = {0} is not a function but a measure; only n = 1, 2 are supported")]
    UnsupportedDimension(usize),

    #[error("evaluation too close to the light cone: |t^2 - |x|^2| = {gap:.3e}")]
    ConeProximal { gap: f64 },

    #[error("non-finite kernel value for source {source_index} at collocation row {row}")]
    NonFiniteKernel { source_index: usize, row: usize },

    #[error("source {source_index} lies within {distance:.3e} of collocation point {point_index}")]
    SourceCollision {
        source_index: usize,
        point_index: usize,
        distance: f64,
    },

    #[error("SVD failed to converge: {0}")]
    Svd(String),

    #[error("rank-deficient system cannot be solved without regularization (gamma = 0, sigma_min = {sigma_min:.3e})")]
    RankDeficient { sigma_min: f64 },

    #[error("no admissible regularization parameter on the grid")]
    EmptyGrid,

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{failed} of {total} sample paths failed (more than 10%)")]
    TooManyFailures { failed: usize, total: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

/// Attaches a pipeline stage name to an error.
pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| Error::Stage {
            stage,
            source: Box::new(e),
        })
    }
}
