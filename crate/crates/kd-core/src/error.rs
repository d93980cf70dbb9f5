use thiserror::Error;

/// Everything that can go wrong while building or using KD representations.
#[derive(Debug, Error)]
pub enum KdError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension {dim} exceeds the configured maximum of {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("matrix contains a non-finite entry ({what})")]
    NonFinite { what: &'static str },

    #[error("matrix is not Hermitian (max deviation {dev:.3e}, tol {tol:.1e})")]
    NotHermitian { dev: f64, tol: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPositive { min_eig: f64 },

    #[error("trace is {got:.12}, expected {expected} (tol {tol:.1e})")]
    BadTrace { expected: f64, got: f64, tol: f64 },

    #[error("effect has an eigenvalue outside [0, 1]: {eig:.12}")]
    EffectOutOfRange { eig: f64 },

    #[error("effects do not sum to the identity (max deviation {dev:.3e})")]
    IncompletePovm { dev: f64 },

    #[error("Kraus operators are not trace-preserving (max deviation {dev:.3e})")]
    NotTracePreserving { dev: f64 },

    #[error("Kraus operators increase trace (min eigenvalue of 1 - sum K'K is {min_eig:.3e})")]
    NotTraceNonincreasing { min_eig: f64 },

    #[error("basis is not orthonormal (max Gram deviation {dev:.3e})")]
    NotOrthonormal { dev: f64 },

    /// The two bases have a (near-)orthogonal pair, so no faithful KD frame
    /// exists: dual operators scale as the inverse overlap.
    #[error("bases are (near-)orthogonal at pair ({i}, {i_prime}): |overlap| = {overlap:.3e} < floor {floor:.1e}")]
    OrthogonalPair {
        i: usize,
        i_prime: usize,
        overlap: f64,
        floor: f64,
    },

    #[error("pre- and post-selection are (near-)orthogonal: |overlap| = {overlap:.3e} < floor {floor:.1e}")]
    OrthogonalPrePost { overlap: f64, floor: f64 },

    #[error("representation vectors refer to different frames")]
    FrameMismatch,

    #[error("eigendecomposition did not converge")]
    EigenFailure,

    #[error("{what} must not be empty")]
    Empty { what: &'static str },

    #[error("invalid configuration: {msg}")]
    InvalidConfig { msg: String },

    #[error("internal invariant violated: {msg}")]
    Internal { msg: String },
}

pub type Result<T> = std::result::Result<T, KdError>;
