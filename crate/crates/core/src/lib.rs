//! Combinatorics of the discretized `ℓ∞` spheres: the tetris operation,
//! block sequences and their spans, type decompositions, constructive
//! extraction pipelines for monochromatic and approximately monochromatic
//! subspaces, exact tiny Ramsey-type numbers, and big-integer evaluation of
//! the associated primitive recursive upper-bound recursions.

pub mod blocks;
pub mod bounds;
pub mod error;
pub mod extract;
pub mod func;
pub mod oracle;
pub mod search;
pub mod types;
pub mod verifier;

pub use blocks::{FuncBlockSeq, SetBlockSeq, SpanMode};
pub use error::{Error, Result};

/// Size the global worker pool used by parallel sweeps (`jobs > 1`).
pub fn configure_thread_pool(jobs: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build_global()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))
}
pub use extract::{ExtractionReport, Outcome, Witness};
pub use func::FiniteFunction;
pub use oracle::{Color, Coloring, ColoringOracle, Domain, Element};
pub use search::Search;
pub use types::GType;
