//! Exact approximation numbers, certified entropy bounds and tractability
//! classifiers for weighted periodic Sobolev and Gevrey embeddings.

pub mod approx;
pub mod constants;
pub mod entropy;
pub mod error;
pub mod gevrey;
pub mod lattice;
pub mod tractability;
pub mod weights;

pub use error::{Error, Result};
