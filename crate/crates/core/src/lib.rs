//! Left-invariant Killing forms on 2-step nilpotent metric Lie algebras.

pub mod algebra;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod exterior;
pub mod io;
pub mod killing;
pub mod linalg;
pub mod report;
pub mod sampling;
pub mod structure;

pub use algebra::{AdaptedFrame, MetricLieAlgebra, Subspace, ValidationReport};
pub use error::{Error, Result};
pub use exterior::Form;
