//! Numerical study of the I3322 Bell functional on Schmidt-diagonal states.
//!
//! The crate provides:
//!
//! - [`symmat`]: a small dense real symmetric matrix kit (Jacobi
//!   eigendecomposition, projector validation, positive-eigenspace
//!   extraction, PSD margins),
//! - [`bell`]: the strategy data model, correlators, the I3322 functional,
//!   classical enumeration, entanglement entropy and the strategy file
//!   format,
//! - [`structure`]: CS decomposition of projector pairs, basis alignment,
//!   component analysis and joint normal forms (chain and cyclic branches),
//! - [`ascent`]: best-response updates, seesaw ascent and coefficient-space
//!   optimization of normal forms,
//! - [`bounds`]: closed-form values of normal forms, the two-variable
//!   function `f`, and certified grid oracles for the bound claims,
//! - [`soscheck`]: a sum-of-squares certificate model and verifier with the
//!   built-in `i3322-case3` certificate.
//!
//! Everything is deterministic: seeds are explicit, reductions are
//! order-independent, and parallel execution (the default `parallel`
//! feature, backed by rayon) produces bit-identical results to the
//! sequential fallback.

pub mod ascent;
pub mod bell;
pub mod bounds;
pub mod par;
pub mod sampling;
pub mod soscheck;
pub mod structure;
pub mod symmat;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix not symmetric at ({i},{j}): |a_ij - a_ji| = {defect:.3e} exceeds {tol:.0e}")]
    NotSymmetric {
        i: usize,
        j: usize,
        defect: f64,
        tol: f64,
    },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("{what}: invalid dimension {dim}")]
    BadDimension { what: &'static str, dim: usize },
    #[error("{which} is not a projector: {detail}")]
    NotProjector { which: String, detail: String },
    #[error("invalid Schmidt vector: {0}")]
    InvalidSchmidt(String),
    #[error("invalid normal-form spec: {0}")]
    InvalidSpec(String),
    #[error("no closed-form value for branch {0}")]
    UnsupportedBranch(String),
    #[error("component does not match any normal-form branch: {0}")]
    NonNormalComponent(String),
    #[error("decompositions do not share a basis: {0}")]
    InconsistentBases(String),
    #[error("schema error at `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("invalid certificate: {0}")]
    Certificate(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
