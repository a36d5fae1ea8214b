//! Label propagation on networks with heterogeneous degrees and imbalanced
//! classes.
//!
//! The entry points most callers want are [`propagate::wil_scores`],
//! [`propagate::tune_rho`] and [`pdcbm::generate`]. The `examples/`
//! directory has one runnable program per capability.

pub mod bench;
pub mod cli;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod labels;
pub mod pdcbm;
pub mod propagate;
pub mod rng;
pub mod scores;
pub mod theory;

pub use error::{Error, Result};
pub use graph::Graph;
pub use labels::{ClassId, LabelSet};
pub use propagate::{Kernel, PropagationConfig, Solver};
pub use scores::ScoreMatrix;
