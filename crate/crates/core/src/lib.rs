//! Quantum-correlation toolbox for bipartite density matrices.
//!
//! The crate constructs a catalogue of bound entangled states (Horodecki
//! 2⊗4 / 3⊗3 / 4⊗4, the Pyramid and Tiles UPB states, Benatti 4⊗4,
//! Werner and isotropic families), decomposes them into Bloch form, and
//! evaluates two measures of quantumness:
//!
//! * geometric discord (GD) — the minimal squared Hilbert-Schmidt
//!   disturbance over von Neumann measurements on subsystem A, and
//! * measurement-induced nonlocality (MIN) — the maximal disturbance over
//!   measurements that leave the reduced state of A invariant.
//!
//! Exact values are produced where an eigenvalue argument settles the
//! optimization (2⊗n states, non-degenerate marginals, single 2-d
//! degenerate blocks); elsewhere the crate reports eigenvalue bounds and
//! deterministic Haar-sampled estimates.

pub mod bloch;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod optimizer;
pub mod states;

pub use bloch::{decompose, generators, gram, reconstruct, BlochForm, GeneratorBasis};
pub use entanglement::{
    classify_horodecki_3x3, is_ppt, negativity, partial_transpose, Horodecki3x3Regime, Side,
};
pub use error::{Error, Result};
pub use measures::{
    apply_measurement, closed_forms, gd_candidate_3x3, gd_exact_2xn, gd_lower_bound, marginal,
    min_exact_2d_block, min_exact_nondegenerate, min_upper_bound, normalized_distance,
    preserves_marginal, EstimateKind, MeasureEstimate, Measurement,
};
pub use optimizer::{haar_unitary, histogram, sample_gd, sample_min, SampleReport, SamplerConfig};
pub use states::{
    benatti_4x4, horodecki_2x4, horodecki_3x3, horodecki_4x4_key, isotropic, upb_pyramid,
    upb_tiles, werner, DensityMatrix, StateFamily, StateSpec, ValidationReport,
};
