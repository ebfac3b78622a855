//! Entropy continuity bounds for m-partially majorized distributions.
//!
//! Given p and q with q m-partially majorized by p and TV(p, q) ≤ ε, the
//! functions here bound H(p) − H(q) under a rank or an energy constraint,
//! compute the tight extremal pairs, the majorization dimension, and the
//! numerical checks that back all of it.

// `!(x >= 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod extremal;
pub mod figures;
pub mod gibbs;
pub mod io;
pub mod majdim;
mod optimize;
pub mod par;
pub mod report;
pub mod simplex;
pub mod verify;

pub use bounds::{
    energy_bound, energy_bound_closed_form, energy_bound_sd, oscillator_bound, oscillator_bound_sd,
    quantum_energy_params, rank_bound, rank_bound_sd, state_dependent_params, BoundResult, Branch,
};
pub use error::{Error, Result};
pub use extremal::{delta_gap, extremal_pair_energy, extremal_pair_rank, gibbs_distribution, ExtremalPair};
pub use majdim::{sufficient_majorization_dim, MajDimOptions, MajDimResult};
pub use par::Execution;
pub use report::{fmt_sig, Table};
pub use gibbs::{
    a_zero, gibbs_weights, max_entropy_f, partition_sum, solve_beta, EnergySequence, GibbsPoint, MaxEntropy,
};
pub use simplex::{
    binary_entropy, partial_majorizes, perturbation_gap, shannon_entropy, tv_distance, vsl_reduce, ProbDist,
};
pub use verify::{brute_force_f, fuzz_bound_validity, fuzz_reduction, identity_suite, FuzzConfig, FuzzReport};
