use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by instance generation, solvers, and the benchmark harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("hole probability {0} outside [0, 1]")]
    HoleProbability(f64),

    /// Every lattice site was removed; callers should resample with a fresh seed.
    #[error("empty instance: all {0} sites removed by hole sampling")]
    EmptyInstance(usize),

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("edge endpoint {endpoint} out of range for {n} vertices")]
    EndpointOutOfRange { endpoint: usize, n: usize },

    #[error("graph has {n} vertices, above the enumeration cap {cap}; use solve_mis for a single witness")]
    EnumerationCap { n: usize, cap: usize },

    #[error("bitmask solvers support at most 64 vertices, got {0}")]
    TooManyVertices(usize),

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("k = {k} out of range 1..={max}")]
    KOutOfRange { k: usize, max: usize },

    #[error("invalid profile: D_k*(0) = {0} is not positive")]
    InvalidProfile(f64),

    #[error("engineered profile failed verification: {0}")]
    ProfileVerification(String),

    #[error("vertex positions required for interaction energies but absent")]
    MissingPositions,

    #[error("norm drift {drift:.3e} exceeds tolerance {tol:.3e}; reduce the integrator step")]
    IntegratorFailure { drift: f64, tol: f64 },

    #[error("state dimension {dim} does not match 2^{n}")]
    DimensionMismatch { dim: usize, n: usize },

    #[error("correlation undefined for constant input series")]
    ConstantSeries,

    #[error("need at least {need} samples, got {got}")]
    NotEnoughSamples { need: usize, got: usize },

    #[error("no positive samples to fit after excluding {excluded}")]
    NoPositiveSamples { excluded: usize },

    #[error("no connected |MIS|-1 states")]
    NoConnectedStates,

    #[error("invalid config: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
