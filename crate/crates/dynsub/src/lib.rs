//! Dynamic non-monotone submodular maximization under a cardinality
//! constraint.
//!
//! The crate maintains an approximate maximizer of a non-negative submodular
//! function over a ground set that changes by single-element inserts and
//! deletes. It combines:
//!
//! - a thresholding [`leveling`] backend that repairs a leveled greedy chain
//!   locally on each update,
//! - a two-instance [`reduction`] that handles non-monotonicity by pruning
//!   the first instance's solution (uniform sampling or a randomized
//!   double-greedy pass) and running a second instance on the complement,
//! - a [`guess`] orchestrator that runs the reduction across a geometric
//!   grid of optimum guesses, routing each element only to the guesses it
//!   can matter for,
//! - streaming [`baselines`] for comparison, and
//! - brute-force [`verify`] oracles plus a benchmark harness ([`bench`]).
//!
//! All objective access is metered by [`oracle::CountingOracle`]; query
//! counts are the cost model throughout.

pub mod baselines;
pub mod bench;
pub mod dataio;
pub mod elements;
pub mod guess;
pub mod leveling;
pub mod matrix;
pub mod objectives;
pub mod oracle;
pub mod reduction;
pub mod verify;

pub use elements::{seed_mix, set_of, ElementId, ElementSet, GroundSet};
pub use oracle::{CountingOracle, Objective, OracleError, SharedObjective};
