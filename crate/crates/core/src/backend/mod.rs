//! Model capabilities behind a JSON wire protocol.
//!
//! Five capabilities (parse, fill, read, detect, complete) are expressed as
//! traits. Each has an HTTP client speaking the wire format and, where it makes
//! sense, a deterministic in-process baseline so pipelines run without models.

pub mod baselines;
pub mod client;
pub mod config;
pub mod server;
pub mod wire;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::squad::Paragraph;

pub use baselines::{
    gazetteer_fill, oracle_detect, overlap_read, BigramCompleter, ChunkParser, GazetteerFiller,
    GazetteerTable, LookupDetector, OracleDetector, OverlapReader, TreebankParser,
};
pub use client::{HttpCompleter, HttpDetector, HttpFiller, HttpParser, HttpReader};
pub use config::{BackendEndpoint, Capability, EndpointConfig};

/// Inputs for filling one masked constituent: global context, local context,
/// and the sentence with exactly one mask token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillRequest {
    pub first_sentence: String,
    pub previous_sentence: String,
    pub masked_sentence: String,
    pub next_sentence: String,
}

/// Side information about the masked span. Remote fillers receive it as
/// optional hints; the gazetteer baseline needs `label` and `original`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedSpan {
    pub label: String,
    pub original: String,
    pub mask_token: String,
    pub seed: u64,
}

/// A reader's best span in one context, with the scores used for selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredAnswer {
    pub text: String,
    pub char_span: (usize, usize),
    pub span_score: f64,
    pub trust_score: f64,
    pub fused_score: f64,
    pub context_index: usize,
}

impl ScoredAnswer {
    pub fn new(text: String, char_span: (usize, usize), span_score: f64) -> Self {
        ScoredAnswer {
            text,
            char_span,
            span_score,
            trust_score: 1.0,
            fused_score: span_score,
            context_index: 0,
        }
    }
}

pub trait ConstituencyParser: Send + Sync {
    /// Bracketed tree whose leaves align with `sentence`.
    fn parse(&self, sentence: &str) -> Result<String>;
}

pub trait Filler: Send + Sync {
    /// Up to `n` candidate replacements for the masked span.
    fn fill(&self, request: &FillRequest, span: &MaskedSpan, n: usize) -> Result<Vec<String>>;
}

pub trait Reader: Send + Sync {
    fn read(&self, question: &str, paragraph: &str) -> Result<ScoredAnswer>;
}

pub trait Detector: Send + Sync {
    /// Trust that the context is real, in `[0, 1]`.
    fn detect(&self, context: &Paragraph) -> Result<f64>;
}

pub trait Completer: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<String>;
}
