#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN
#![allow(clippy::needless_range_loop)] // matrix code reads better with explicit indices

pub mod analysis;
pub mod cli;
pub mod error;
pub mod morse_ref;
pub mod ode;
pub mod oracle;
pub mod quadrature;
pub mod sampled;
pub mod special_fn;
pub mod spectrum;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
