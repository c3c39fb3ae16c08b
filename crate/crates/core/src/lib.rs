//! Construction and evaluation of contradicting-context question answering
//! datasets.
//!
//! Fake contexts are produced by iterative constituency mask-and-fill, by
//! prefix completion, or by human annotators whose edits are checked against
//! mechanical guidelines. Readers are then evaluated on a real passage mixed
//! with its fakes, optionally re-ranked by a fake-context detector.

pub mod annotation;
pub mod backend;
pub mod error;
pub mod eval;
pub mod fakes;
pub mod gcf;
pub mod http;
pub mod meta;
pub mod ptb;
pub mod rewrite;
pub mod seed;
pub mod squad;
pub mod text;

pub use backend::{FillRequest, ScoredAnswer};
pub use error::{Error, Result};
pub use ptb::{ConstituentSpan, ParseTree};
pub use rewrite::{EditTrace, RewriteConfig};
pub use squad::{ContraSample, Paragraph, Provenance, QaPair};
