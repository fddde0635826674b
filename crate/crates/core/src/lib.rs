//! Small-cycle statistics of products of independent conjugation-invariant
//! random permutations.
//!
//! The crate is organised as a laboratory: exact permutation algebra
//! ([`perm`]), seeded samplers ([`sampler`]), the traversal graphs and their
//! classes ([`graph`]), an exact rational enumeration oracle ([`oracle`]),
//! Monte Carlo estimators and Poisson reference laws ([`stats`],
//! [`montecarlo`]), and stable report emission ([`report`]).

pub mod error;
pub mod graph;
pub mod montecarlo;
pub mod oracle;
pub mod perm;
pub mod rational;
pub mod report;
pub mod sampler;
pub mod stats;

pub use error::{Error, Result};
pub use perm::{CycleCounts, Permutation};
