use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (deviation {deviation:.3e} exceeds {tol:.1e})")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("dimension {dim} exceeds the dense cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("iterative eigensolver did not converge after {matvecs} matvecs (residual {residual:.3e})")]
    NoConvergence { matvecs: usize, residual: f64 },

    #[error("subspace is empty")]
    EmptySubspace,

    #[error("bad support: {0}")]
    BadSupport(String),

    #[error("layer {layer} out of range ({layers} layers)")]
    LayerOutOfRange { layer: usize, layers: usize },

    #[error("system has no layer partition")]
    NoLayers,

    #[error("bad sector: {0}")]
    BadSector(String),

    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },

    #[error("invalid regime: {0}")]
    InvalidRegime(String),

    #[error("bound verification requires an exactly enumerated theta")]
    InexactTheta,

    #[error("projected state has norm {x:.3e}; nothing left to decompose")]
    AllProjectedOut { x: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("bad graph: {0}")]
    BadGraph(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("invalid lambda {0}: amplification needs 0 <= lambda < 1")]
    InvalidLambda(f64),

    #[error("walk enumeration of {count} walks exceeds the cap {cap}")]
    EnumerationTooLarge { count: u128, cap: u64 },

    #[error("expected a two-layer system, found {0} layers")]
    NotTwoLayers(usize),

    #[error("invalid walk: {0}")]
    BadWalk(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        }
    }
}
