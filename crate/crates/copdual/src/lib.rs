//! Exact analyzer for linear copositive constraint systems.
//!
//! A problem is a matrix pencil `A(x) = A0 + x_1 A1 + ... + x_n An` of
//! symmetric `p x p` matrices; the feasible set consists of the `x` for which
//! `A(x)` is copositive (nonnegative quadratic form on the nonnegative
//! orthant, equivalently on the standard simplex `T`).
//!
//! The crate decides whether such a system admits uniform LP duality, that
//! is, whether the semi-infinite dual over atomic completely positive
//! matrices attains the primal value for every cost vector. The decision
//! works through the immobile set of the constraints, two cone membership
//! conditions on lifted row vectors, and emits exact rational certificates
//! for every verdict. A gap laboratory demonstrates positive duality gaps
//! on instances that fail the criteria.
//!
//! All arithmetic is exact: scalars are arbitrary-precision rationals and
//! every certificate re-verifies by re-multiplication. Floating point never
//! enters a decision; it appears only in cosmetic report summaries.

pub mod copositive;
pub mod duality;
pub mod gap;
pub mod immobile;
pub mod lp;
pub mod matrix;
pub mod model;
pub mod rat;
pub mod report;

pub use copositive::{
    is_copositive, min_quadratic_over_polytope, min_quadratic_over_simplex, zero_set,
    CopositivityCheck, SimplexMin,
};
pub use duality::{
    analyze, bilinear_lifted, check_a1, check_b1, check_cond2, check_condition_i,
    check_condition_ii, cone_membership, decompose_dyad, duffin_fw, finite_cone_membership,
    A1Report, AnalysisOutcome, B1Report, Cond2Entry, CondIIEntry, CondIIReport, CondIReport,
    ConeCertificate, Domain, DualityVerdict, DuffinFW,
};
pub use gap::{
    duality_gap, solve_dual_discretized, solve_primal, CPWitness, DualLevel, DualLevelStatus,
    GapReport,
};
pub use immobile::{
    compute_m, compute_n_star, find_immobile_set, index_sets, is_immobile_point, omega_sample,
    restricted_immobile, sip_optimize, EngineConfig, ImmobileStatus, ImmobileStructure,
    ImmobilityProbe, IndexSets, MinActiveSolution, SipOutcome, SipStatus,
};
pub use lp::{LpProblem, LpResult};
pub use matrix::RatMatrix;
pub use model::CopSystem;
pub use rat::Rat;
pub use report::{analysis_report, copositivity_report, duffin_report, gap_report, render};

/// Errors surfaced by parsing, validation and size limits.
#[derive(Debug, thiserror::Error)]
pub enum CopError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("matrix {index} is not symmetric at entry ({row},{col}): {left} != {right}")]
    NotSymmetric {
        index: usize,
        row: usize,
        col: usize,
        left: String,
        right: String,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("order {0} exceeds the face enumeration limit 8")]
    OrderTooLarge(usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
