//! Limit cycles of intermittent control under model mismatch.
//!
//! The pipeline runs model → LQ design → error system → spectral analysis of
//! the event-to-event map, and an event-driven simulator checks the
//! predictions. `cli` and `scenario` wire it to JSON scenario files.

// Negated float comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod numerics;

pub mod analysis;
pub mod design;
pub mod errorsys;
pub mod model;
pub mod simulator;

pub mod cli;
pub mod scenario;

pub use error::{Error, Result};
