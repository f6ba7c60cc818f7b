//! Verification analytics: orthogonality, interlacing and WKB counting.

pub mod gram;
pub mod interlacing;
pub mod wkb;

pub use gram::{deformed_orthogonality_gram, deformed_state_gram, orthogonality_gram, GramReport, Measure, ParityClass};
pub use interlacing::{interlacing_check, InterlacingReport, ZeroSequences};
pub use wkb::{wkb_count, wkb_count_energy, wkb_invert};
