//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A state-family parameter lies outside its admissible range.
    #[error("parameter `{param}` = {value} out of range [{min}, {max}] for {family}")]
    ParamOutOfRange {
        family: &'static str,
        param: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// Matrix or bipartition dimensions do not line up.
    #[error("dimension mismatch: {context} (expected {expected}, got {actual})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A matrix that must be a density operator fails an invariant.
    #[error("invalid density matrix: hermiticity defect {herm:.3e}, trace defect {trace:.3e}, min eigenvalue {min_eig:.3e}")]
    InvalidState {
        herm: f64,
        trace: f64,
        min_eig: f64,
    },

    /// Bloch decomposition of a non-Hermitian matrix.
    #[error("matrix is not Hermitian: imaginary coefficient residue {residue:.3e}")]
    NonHermitian { residue: f64 },

    /// An operation only defined for a specific subsystem-A dimension.
    #[error("{op} requires dim_a = {required}, state has dim_a = {actual}")]
    UnsupportedDimension {
        op: &'static str,
        required: usize,
        actual: usize,
    },

    /// The measures prefactor m/(m-1) requires dim_a <= dim_b.
    #[error("measures require dim_a <= dim_b, state has ({dim_a}, {dim_b}); reinterpret first")]
    SubsystemOrder { dim_a: usize, dim_b: usize },

    /// The marginal is degenerate where a non-degenerate spectrum is required.
    #[error("marginal of A is degenerate (smallest gap {gap:.3e}); use the block-based operations")]
    DegenerateMarginal { gap: f64 },

    /// The marginal degeneracy pattern does not match the requested solver.
    #[error("marginal degeneracy pattern {found} does not match the required pattern {required}")]
    DegeneracyPattern {
        required: &'static str,
        found: String,
    },

    /// Projector set fails the measurement invariants.
    #[error("invalid measurement: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    InvalidMeasurement { defect: f64, tol: f64 },

    /// State-spec string could not be parsed.
    #[error("cannot parse state spec: {reason} (at `{token}`)")]
    Parse { token: String, reason: String },

    /// Empty input where at least one value is required.
    #[error("empty input: {context}")]
    EmptyInput { context: &'static str },

    /// A scalar argument outside its admissible range.
    #[error("invalid argument: {context}")]
    InvalidArgument { context: &'static str },
}
