use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not Hermitian (max |A - A†| = {deviation:e})")]
    Hermiticity { deviation: f64 },

    #[error("matrix is not unitary (max |U†U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("columns are not orthonormal (max |M†M - I| = {deviation:e})")]
    Orthonormality { deviation: f64 },

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("{}ensemble does not realize the density operator (max deviation {deviation:e})", target_prefix(.target))]
    Realization {
        target: Option<usize>,
        deviation: f64,
    },

    #[error("{}ensemble member {member} lies outside the support of the density operator (residual {residual:e})", target_prefix(.target))]
    Support {
        target: Option<usize>,
        member: usize,
        residual: f64,
    },

    #[error(
        "ancilla dimension {ancilla_dim} is smaller than the rank {rank} of the density operator"
    )]
    AncillaTooSmall { ancilla_dim: usize, rank: usize },

    #[error("invalid operator basis: {0}")]
    Basis(String),

    #[error("incomplete correlation data: missing {} record(s), first {:?}", .missing.len(), .missing.first())]
    IncompleteData { missing: Vec<Vec<usize>> },

    #[error("reconstruction is not physical: {0}")]
    Physicality(String),

    #[error("correlation value {value} outside [-1, 1]")]
    Range { value: f64 },

    #[error("overlap x = {x} outside the open interval (0, 1)")]
    Domain { x: f64 },

    #[error("observables do not act on disjoint factors: {0}")]
    Commutation(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Targets are numbered from 1 in messages.
fn target_prefix(target: &Option<usize>) -> String {
    match target {
        Some(n) => format!("target {}: ", n + 1),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
