//! # gaussent
//!
//! Multipartite Gaussian entanglement measures for continuous-variable
//! quantum states, computed from covariance matrices.
//!
//! A Gaussian state of `N` bosonic modes is described (up to displacement)
//! by a real symmetric `2N x 2N` covariance matrix in `qqpp` ordering,
//! normalized so the vacuum is the identity. On top of that representation
//! this crate provides:
//!
//! - symplectic linear algebra: symplectic eigenvalues, Williamson
//!   decomposition, partial trace, direct sums, symplectic conjugation
//!   ([`cov`], [`symplectic`]);
//! - mode partitions and the refinement preorder ([`partition`]);
//! - entropy functionals: von Neumann entropy, partition entropy, entropy
//!   of entanglement for pure states ([`mod@entropy`]);
//! - state factories and canonical forms: thermal states, squeezers, the
//!   symmetric three-mode squeezer and its GHZ/W output, pure and mixed
//!   three-mode standard forms, q-p structure detection ([`states`]);
//! - Gaussian entanglement of formation for mixed states of up to three
//!   modes, by constrained derivative-free minimization over pure-state
//!   decompositions, with a reduced q-p search path and a brute-force
//!   grid oracle ([`mod@geof`]).
//!
//! Entropies are reported in bits (base-2 logarithms).
//!
//! ## Conventions
//!
//! Quadratures are ordered `(q1..qN, p1..pN)` and the symplectic form is
//! `Omega = [[0, I], [-I, 0]]`. A covariance matrix is physical iff every
//! symplectic eigenvalue satisfies `nu >= 1`, and pure iff all `nu == 1`.

#![forbid(unsafe_code)]

use thiserror::Error;

pub use nalgebra;

pub mod cov;
pub mod entropy;
pub mod geof;
pub mod partition;
pub mod states;
pub mod symplectic;

pub(crate) mod linalg;
pub(crate) mod nm;

pub use cov::{
    apply_symplectic, direct_sum, partial_trace, CovarianceMatrix, GaussianState, Physicality,
};
pub use entropy::{
    alpha_entropy, alpha_eoe, entropy, h_aux, n_mode_eoe, single_mode_entropy, EntropyValue,
};
pub use geof::{
    feasible, geof, geof_general, geof_qp, grid_oracle, objective, sweep_nbar, Feasibility,
    GeofMode, GeofModeUsed, GeofResult, OptimizationConfig, OracleResult, SweepRow, SweepScenario,
};
pub use partition::Partition;
pub use states::{
    ghzw, ghzw_alpha_prime, ghzw_standard_form, gluo, is_qp, mixed3_standard_form, pure3_family,
    pure3_standard_form, qp_split, rotation, squeeze, thermal, three_mode_squeezer,
    two_mode_squeezer, vacuum, GluoParams, ModeGluo, Pure3Params, R_MAX,
};
pub use symplectic::{assemble_pure, PureXy, SymplecticMatrix};

/// Relative tolerance for the symmetry check on covariance matrices.
pub const SYMMETRY_RTOL: f64 = 1e-12;

/// A covariance matrix is physical iff `min_nu >= 1 - PHYSICALITY_TOL`.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// A covariance matrix is pure iff every `|nu - 1| <= PURITY_TOL`.
pub const PURITY_TOL: f64 = 1e-9;

/// Tolerance for the symplectic condition `M Omega M^T = Omega`.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Absolute threshold below which q-p coupling entries count as zero.
pub const QP_TOL: f64 = 1e-10;

/// Relative tolerance when pairing the `2N` eigenvalue magnitudes of
/// `i Omega sigma` into `N` symplectic eigenvalues.
pub const PAIRING_RTOL: f64 = 1e-9;

/// Purity guard used by measures that are only defined on pure states.
/// Looser than [`PURITY_TOL`] so that states assembled from long chains of
/// floating-point symplectic products still qualify.
pub const MEASURE_PURITY_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:.3e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("matrix is not symplectic (max |M Omega M^T - Omega| = {deviation:.3e})")]
    NotSymplectic { deviation: f64 },

    #[error("covariance matrix is unphysical (min symplectic eigenvalue {min_nu})")]
    Unphysical { min_nu: f64 },

    #[error("state is not pure (max |nu - 1| = {deviation:.3e})")]
    NotPure { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("not a q-p state (max q-p coupling {max_coupling:.3e})")]
    NotQp { max_coupling: f64 },

    #[error(
        "local mixednesses violate the triangle condition |a_i - a_j| <= a_k - 1: \
         a = [{}, {}, {}]",
        .a[0], .a[1], .a[2]
    )]
    TriangleViolation { a: [f64; 3] },

    #[error("{context}: numerical procedure failed (residual {residual:.3e})")]
    Numerical { context: String, residual: f64 },

    #[error("mixed-state optimization supports at most 3 modes, got {n_modes}")]
    UnsupportedSize { n_modes: usize },

    #[error("optimization found no feasible candidate (best residual {best_residual:.3e})")]
    OptimizationFailed { best_residual: f64 },

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
