//! Relative entropy, the J-divergence, mean-constrained information
//! projections and large-deviation experiments for random probability
//! measures on `[0, 1]`.

pub mod checks;
pub mod cli;
pub mod divergences;
pub mod error;
pub mod ldp_lab;
pub mod measures;
pub mod projections;
pub mod random_measures;
pub mod special;

pub use error::{Error, Result};
pub use measures::{DiscreteMeasure, Partition, SimplexVector};
