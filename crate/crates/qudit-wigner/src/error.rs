//! Crate-wide error type.

/// Everything that can go wrong while building states, transforming grids or
/// running the protocol.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The requested Hilbert-space dimension is not an odd prime ≥ 3.
    #[error("dimension must be an odd prime (got {0})")]
    InvalidDimension(u64),

    /// The requested dimension exceeds the configured cap.
    #[error("dimension {n} exceeds the supported cap {cap} (override with QUDIT_WIGNER_MAX_DIM)")]
    DimensionCapExceeded {
        /// Requested dimension.
        n: u64,
        /// Active cap.
        cap: u64,
    },

    /// Two objects that must share a dimension or party count do not.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A state vector whose amplitudes do not have unit norm.
    #[error("state is not normalized: |Σ|ψ|² − 1| = {0:.3e}")]
    NotNormalized(f64),

    /// A matrix that should be Hermitian is not.
    #[error("matrix is not Hermitian: max |ρ − ρ†| entry = {0:.3e}")]
    NotHermitian(f64),

    /// A density matrix whose trace differs from one.
    #[error("density matrix trace deviates from 1 by {0:.3e}")]
    BadTrace(f64),

    /// A density matrix with a significantly negative eigenvalue.
    #[error("matrix is not positive semidefinite: min eigenvalue = {0:.3e}")]
    NotPositiveSemidefinite(f64),

    /// A Wigner transform whose trace values kept a non-negligible imaginary
    /// part, signalling a non-Hermitian input.
    #[error("non-Hermitian input: Wigner values have imaginary residue {0:.3e}")]
    NonHermitianInput(f64),

    /// Grid values that do not sum to one.
    #[error("grid is not normalized: Σ values = {0:.17}")]
    GridNotNormalized(f64),

    /// A noise kernel that is not a probability distribution over (ℤ_N)².
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    /// An entanglement resource grid that does not correspond to a valid
    /// density matrix.
    #[error("invalid entanglement resource: {0}")]
    InvalidResource(String),

    /// A measurement outcome whose probability vanished; conditioning on it
    /// is undefined.
    #[error("outcome probability {0:.3e} is too small to condition on")]
    ZeroProbability(f64),

    /// An outcome probability below −1e-10, signalling an invalid resource
    /// grid that escaped validation.
    #[error("negative outcome probability {0:.3e}")]
    NegativeProbability(f64),

    /// An unrecognized state descriptor on the command line.
    #[error("unknown state spec `{0}` (expected position:<k>, momentum:<l>, random:<seed>, gaussian:<sigma>, epr, mixed, or file:<path>)")]
    UnknownSpec(String),

    /// A malformed kernel descriptor on the command line.
    #[error("unknown kernel spec `{0}` (expected ideal, uniform, gaussian:<sigma>, or file:<path>)")]
    UnknownKernel(String),

    /// A grid or table file that could not be parsed.
    #[error("parse error in {path}: {reason}")]
    Parse {
        /// Offending file.
        path: String,
        /// What went wrong.
        reason: String,
    },

    /// A sweep width list that is not strictly increasing.
    #[error("width list must be strictly increasing")]
    NonMonotoneWidths,

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors raised by numerical validation rather than bad
    /// configuration; the CLI maps these to a distinct exit code.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotNormalized(_)
                | Error::NotHermitian(_)
                | Error::BadTrace(_)
                | Error::NotPositiveSemidefinite(_)
                | Error::NonHermitianInput(_)
                | Error::GridNotNormalized(_)
                | Error::InvalidResource(_)
                | Error::ZeroProbability(_)
                | Error::NegativeProbability(_)
        )
    }
}
