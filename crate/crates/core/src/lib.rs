//! Exact inference for discrete similarity networks.
//!
//! A similarity network describes a distribution `P(h, u_1, ..., u_n)` by a
//! connected cover of the hypothesis values and one local Bayesian network
//! per cover cell. This crate provides:
//!
//! * Bayesian networks with exact inference and arc reversal ([`model`],
//!   [`infer`], [`reverse`]);
//! * dense joint tables and brute-force relation tests ([`oracle`]);
//! * covers, similarity networks and their construction from a joint
//!   ([`cover`], [`simnet`]);
//! * posterior computation for strictly positive distributions ([`strict`]);
//! * conversion to hypothesis-specific multinets and zero-tolerant inference
//!   ([`multinet`]);
//! * JSON file formats ([`format`]), random instances ([`synth`]) and the
//!   work-count benchmark ([`bench`]).

pub mod bench;
pub mod cover;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod infer;
pub mod model;
pub mod multinet;
pub mod oracle;
pub mod reverse;
pub mod simnet;
pub mod strict;
pub mod synth;

/// Tolerance for CPT row sums, table sums and posterior sums.
pub const EPS_NORM: f64 = 1e-9;
/// A computed probability at or below this is treated as zero.
pub const EPS_ZERO: f64 = 1e-12;
/// Tolerance for the equalities tested by independence checks.
pub const EPS_CI: f64 = 1e-9;
/// Largest tolerated log-ratio discrepancy between overlapping cells.
pub const EPS_CONSIST: f64 = 1e-6;

pub use cover::{Cover, CoverViolation};
pub use error::{Error, Result};
pub use infer::{evidence_likelihood, infer, infer_with, OpCounts, Strategy};
pub use model::{
    BayesianNetwork, Cpt, Evidence, HypothesisEvent, NetworkBuilder, PosteriorVector, Variable, Warning,
    Violation,
};
pub use multinet::{convert, infer_multinet, ConvertOptions, Multinet};
pub use oracle::{EventFilter, JointTable, DEFAULT_CELL_BUDGET};
pub use reverse::{arc_reverse, reorient};
pub use simnet::{build_similarity_network, DiscreteModel, Kind, LocalNetwork, SimilarityNetwork};
pub use strict::{
    check_consistency, compute_alphas, infer_posterior_strict, recover_prior, AlphaTable,
    ConsistencyReport,
};
