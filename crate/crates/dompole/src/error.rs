use num_complex::Complex64;

/// Errors shared by all modules of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The shifted matrix `A - μE` is numerically singular, i.e. μ is (close
    /// to) a pole. The caller must perturb the shift or abort.
    #[error("shift {shift} is numerically an eigenvalue of the pencil (A, E)")]
    SingularShift { shift: Complex64 },

    /// The pencil handed to the small generalized eigensolver is singular.
    #[error("the pencil is singular to working precision")]
    SingularPencil,

    /// `|w* E v|` fell below the degeneracy threshold, so the eigentriple
    /// cannot be normalized to `w* E v = 1`.
    #[error("eigentriple at {lambda} is near-defective: |w* E v| = {magnitude:.3e}")]
    DegenerateEigenvector { lambda: Complex64, magnitude: f64 },

    /// A matrix exceeds the configured dense-eigendecomposition limit.
    #[error("dimension {dim} exceeds the dense solver limit {limit}")]
    TooLarge { dim: usize, limit: usize },

    /// Malformed Matrix Market content.
    #[error("matrix market format error in {path}: {message}")]
    Format { path: String, message: String },

    /// Matrices in a system do not fit together.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A spectrum recipe cannot be realized with the requested dimensions.
    #[error("invalid generator recipe: {0}")]
    InvalidSpec(String),

    /// Construction of the initial subspaces failed.
    #[error("initialization failed: {0}")]
    InitFailure(String),

    /// The error bound of a modal model is undefined because a tail pole lies
    /// on the imaginary axis.
    #[error("modal error bound is unbounded: pole {pole} has zero real part")]
    UnboundedError { pole: Complex64 },

    /// Configuration rejected before the solver starts.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// File system failure while reading or writing artifacts.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// An underlying LAPACK routine reported a failure.
    #[error("LAPACK routine {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}
