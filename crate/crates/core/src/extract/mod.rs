//! The constructive extraction engine: Milliken–Taylor search, type
//! canonicalization, insensitivity via pyramid sequences, the positive
//! induction, the signed reduction through alternating pyramids, and the
//! multidimensional pipelines.
//!
//! Every pipeline either returns a witness that has been re-verified against
//! its postcondition, or reports that the ambient `n` is too small for the
//! given coloring. Witnesses are never fabricated; budget exhaustion is a
//! distinct error, never conflated with absence.

mod canon;
mod mt;
mod multidim;
mod positive;
pub mod recheck;
mod signed;

pub use canon::{canonize_types, is_insensitive, make_insensitive, pyramid_sequence, CanonKind};
pub use mt::mt_search;
pub use multidim::{
    direct_search_multidim_positive, extract_multidim_positive, extract_multidim_signed,
};
pub use positive::{direct_search_positive, extract_positive, q_embed, q_map};
pub use signed::{approximate_witness, extract_signed, q_delta, signed_carrier};

use serde::Serialize;

use crate::blocks::{FuncBlockSeq, SetBlockSeq};
use crate::oracle::Color;

/// Outcome of an extraction: a verified witness, or absence ("the given n is
/// below the threshold for this coloring").
#[derive(Clone, Debug, Serialize)]
pub enum Outcome {
    Witness(Witness),
    Absent,
}

/// Witness payload. Which parts are present depends on the producing
/// operation: set-level searches fill `sets`, function pipelines fill
/// `funcs`, the signed pipelines fill both (the canonical base and the
/// carrier subsequence).
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sets: Option<SetBlockSeq>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub funcs: Option<FuncBlockSeq>,
    /// The monochromatic (or approximate) color `i₀`; canonicalization
    /// witnesses carry no single color.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub color: Option<Color>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtractionReport {
    pub outcome: Outcome,
    /// Candidates examined while producing this report.
    pub examined: u64,
}

impl ExtractionReport {
    pub fn witness(&self) -> Option<&Witness> {
        match &self.outcome {
            Outcome::Witness(w) => Some(w),
            Outcome::Absent => None,
        }
    }

    pub fn is_witness(&self) -> bool {
        self.witness().is_some()
    }

    pub(crate) fn absent(examined: u64) -> Self {
        ExtractionReport { outcome: Outcome::Absent, examined }
    }

    pub(crate) fn found(w: Witness, examined: u64) -> Self {
        ExtractionReport { outcome: Outcome::Witness(w), examined }
    }
}
