//! Distributions over a model's probabilities and utilities.
//!
//! Scalars are sampled by inverse CDF (bisection on the CDF for the beta
//! and truncated-normal families), table rows by inverse CDF (binary) or
//! normalized gamma draws (Dirichlet). Refinement is replacement: an answer
//! selects a stored subgroup distribution, it never multiplies the prior.

mod distribution;
mod registry;
mod row;
pub mod special;

pub use distribution::{divergence_z, moments, sample, Distribution, Role, UncertainQuantity, QUANTILE_TOL};
pub use registry::{refine, Parameter, Refinement, Registry};
pub use row::{ln_gamma_variate, sample_row, RowDistribution};
