use thiserror::Error;

/// Failure taxonomy shared by every module in the crate.
///
/// Variants map onto process exit codes in the CLI: `OutsideDomain` is a
/// rejected inversion target, `Convergence` a solver that ran out of budget,
/// the rest surface as verification or I/O failures.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a documented precondition (m out of [0,1],
    /// characteristic n >= 1, ell <= frak_l(m), ...).
    #[error("domain: {0}")]
    Domain(String),

    /// A requested rotation-number target lies outside the open moduli
    /// region (or within the rejection margin of its boundary).
    #[error("target outside moduli region: {0}")]
    OutsideDomain(String),

    /// An iterative solver or adaptive integrator exhausted its budget.
    #[error("convergence: {0}")]
    Convergence(String),

    /// Two independent evaluation routes disagree beyond their gate.
    #[error("precision loss: {0}")]
    PrecisionLoss(String),

    /// Sampled data is too coarse for a reliable discrete invariant.
    #[error("resolution: {0}")]
    Resolution(String),

    /// A curve passes too close to an axis or to itself for the requested
    /// computation.
    #[error("clearance: {0}")]
    Clearance(String),

    /// A tangent vector degenerated while computing a turning number.
    #[error("degenerate tangent: {0}")]
    DegenerateTangent(String),

    /// Projection attempted at or near the point at infinity.
    #[error("projection singularity: {0}")]
    Singularity(String),

    /// A verification report contains at least one failing check.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
