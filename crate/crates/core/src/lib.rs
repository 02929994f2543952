//! Riemann zeta through partial Euler products and the prime-indexed
//! sum-of-products form
//!
//! ```text
//! zeta(s) = 1 + sum_k p_k^-s prod_{j >= k} (1 - p_j^-s)^-1,   Re(s) > 1
//! ```
//!
//! with exact finite identities, certified truncation bounds and brute-force
//! integer oracles for every quantity.

pub mod cli;
mod dd;
pub mod error;
pub mod kernel;
pub mod methods;
pub mod oracle;
pub mod primes;

pub use error::{Result, ZetaError};
pub use kernel::{ComplexValue, ExclusionWitness};
pub use methods::{EvalOptions, EvaluationResult, Method, Summation, TruncationSpec};
pub use oracle::PartitionTable;
pub use primes::PrimeCache;
