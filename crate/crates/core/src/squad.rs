//! SQuAD ingestion, contradicting-context sample assembly, and the dataset
//! file format.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::seed;
use crate::text::collapse_whitespace;

/// Current version of the dataset file format.
pub const DATASET_VERSION: u32 = 1;
const DATASET_FORMAT: &str = "contraqa";

/// Where a context paragraph came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    Real,
    HumanFake,
    /// Generated by iterative mask-and-fill with `k` iterations per sentence.
    ModelFake { k: u32 },
    PrefixFake,
    /// An unrelated real paragraph used as a distractor.
    RandomContext,
}

impl Provenance {
    pub fn name(&self) -> &'static str {
        match self {
            Provenance::Real => "real",
            Provenance::HumanFake => "human_fake",
            Provenance::ModelFake { .. } => "model_fake",
            Provenance::PrefixFake => "prefix_fake",
            Provenance::RandomContext => "random_ctx",
        }
    }

    pub fn k(&self) -> Option<u32> {
        match self {
            Provenance::ModelFake { k } => Some(*k),
            _ => None,
        }
    }

    pub fn from_parts(name: &str, k: Option<u32>) -> Result<Self> {
        let p = match (name, k) {
            ("real", None) => Provenance::Real,
            ("human_fake", None) => Provenance::HumanFake,
            ("model_fake", Some(k)) if k >= 1 => Provenance::ModelFake { k },
            ("prefix_fake", None) => Provenance::PrefixFake,
            ("random_ctx", None) => Provenance::RandomContext,
            _ => {
                return Err(Error::Contract(format!(
                    "invalid provenance {name:?} with k={k:?}"
                )))
            }
        };
        Ok(p)
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Provenance::Real)
    }

    /// Stable class key used in attribution histograms.
    pub fn class_key(&self) -> String {
        match self {
            Provenance::ModelFake { k } => format!("model_fake(k={k})"),
            other => other.name().to_string(),
        }
    }
}

/// Identity of a paragraph: hash of its whitespace-collapsed text.
pub fn paragraph_id(text: &str) -> String {
    let digest = Sha256::digest(collapse_whitespace(text).as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Paragraph {
    pub id: String,
    pub text: String,
    pub provenance: Provenance,
}

impl Paragraph {
    pub fn new(text: impl Into<String>, provenance: Provenance) -> Result<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::Contract("paragraph text is empty".into()));
        }
        Ok(Paragraph {
            id: paragraph_id(&text),
            text,
            provenance,
        })
    }

    pub fn real(text: impl Into<String>) -> Result<Self> {
        Self::new(text, Provenance::Real)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaPair {
    pub question: String,
    pub gold_answers: Vec<String>,
    pub source_paragraph_id: String,
}

/// One evaluation unit: a question with shuffled contexts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContraSample {
    pub question: String,
    pub gold_answers: Vec<String>,
    pub contexts: Vec<Paragraph>,
    pub real_index: usize,
    pub shuffle_seed: u64,
}

impl ContraSample {
    pub fn real_context(&self) -> &Paragraph {
        &self.contexts[self.real_index]
    }

    pub fn check(&self) -> Result<()> {
        let reals: Vec<usize> = self
            .contexts
            .iter()
            .enumerate()
            .filter(|(_, c)| c.provenance.is_real())
            .map(|(i, _)| i)
            .collect();
        if reals != [self.real_index] {
            return Err(Error::Contract(format!(
                "sample must have exactly one real context at real_index {}, found real at {reals:?}",
                self.real_index
            )));
        }
        if self.gold_answers.is_empty() {
            return Err(Error::Contract("sample has no gold answers".into()));
        }
        Ok(())
    }

    /// Keep the real context and the first `n` other contexts, preserving order.
    ///
    /// The kept sets are nested in `n`, so a sweep over `n` compares
    /// restrictions of one and the same shuffled arrangement.
    pub fn truncate_fakes(&self, n: usize) -> ContraSample {
        let mut kept = Vec::new();
        let mut fakes = 0;
        let mut real_index = 0;
        for c in &self.contexts {
            if c.provenance.is_real() {
                real_index = kept.len();
                kept.push(c.clone());
            } else if fakes < n {
                fakes += 1;
                kept.push(c.clone());
            }
        }
        ContraSample {
            question: self.question.clone(),
            gold_answers: self.gold_answers.clone(),
            contexts: kept,
            real_index,
            shuffle_seed: self.shuffle_seed,
        }
    }

    pub fn fake_count(&self) -> usize {
        self.contexts.len() - 1
    }
}

#[derive(Deserialize)]
struct SquadFile {
    data: Vec<SquadArticle>,
}

#[derive(Deserialize)]
struct SquadArticle {
    paragraphs: Vec<SquadParagraph>,
}

#[derive(Deserialize)]
struct SquadParagraph {
    context: String,
    #[serde(default)]
    qas: Vec<SquadQa>,
}

#[derive(Deserialize)]
struct SquadQa {
    question: String,
    #[serde(default)]
    answers: Vec<SquadAnswer>,
}

#[derive(Deserialize)]
struct SquadAnswer {
    text: String,
}

fn byte_offset_of(input: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut offset = 0;
    for (i, l) in input.split(|b| *b == b'\n').enumerate() {
        if i + 1 == line {
            return (offset + column.saturating_sub(1)).min(input.len());
        }
        offset += l.len() + 1;
    }
    input.len()
}

fn format_error(input: &[u8], e: serde_json::Error) -> Error {
    Error::Format {
        offset: byte_offset_of(input, e.line(), e.column()),
        message: e.to_string(),
    }
}

/// Parse SQuAD-1.1 JSON. One entry per unique context, in document order.
pub fn parse_squad(input: &[u8]) -> Result<Vec<(Paragraph, Vec<QaPair>)>> {
    let file: SquadFile = serde_json::from_slice(input).map_err(|e| format_error(input, e))?;
    let mut order: Vec<(Paragraph, Vec<QaPair>)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut skipped = 0usize;
    for article in file.data {
        for para in article.paragraphs {
            let paragraph = match Paragraph::real(para.context) {
                Ok(p) => p,
                Err(_) => {
                    skipped += para.qas.len();
                    continue;
                }
            };
            let slot = *index.entry(paragraph.id.clone()).or_insert_with(|| {
                order.push((paragraph.clone(), Vec::new()));
                order.len() - 1
            });
            for qa in para.qas {
                let golds: Vec<String> = qa.answers.into_iter().map(|a| a.text).collect();
                if qa.question.trim().is_empty() || golds.is_empty() {
                    skipped += 1;
                    continue;
                }
                order[slot].1.push(QaPair {
                    question: qa.question,
                    gold_answers: golds,
                    source_paragraph_id: paragraph.id.clone(),
                });
            }
        }
    }
    if skipped > 0 {
        log::warn!("skipped {skipped} questions without answers or text");
    }
    Ok(order)
}

pub fn load_squad(path: impl AsRef<Path>) -> Result<Vec<(Paragraph, Vec<QaPair>)>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_squad(&bytes)
}

/// Shuffle `real` among `fakes` with a permutation keyed by `shuffle_seed`.
pub fn shuffle_contexts(
    real: &Paragraph,
    fakes: &[Paragraph],
    shuffle_seed: u64,
) -> (Vec<Paragraph>, usize) {
    let mut contexts = Vec::with_capacity(fakes.len() + 1);
    contexts.push(real.clone());
    contexts.extend(fakes.iter().cloned());
    contexts.shuffle(&mut seed::rng(shuffle_seed));
    let real_index = contexts
        .iter()
        .position(|c| c.provenance.is_real())
        .unwrap_or(0);
    (contexts, real_index)
}

/// One sample per question, each with its own shuffle of `{real} ∪ fakes`.
pub fn assemble_contra(
    real: &Paragraph,
    fakes: &[Paragraph],
    qas: &[QaPair],
    seed: u64,
) -> Result<Vec<ContraSample>> {
    if !real.provenance.is_real() {
        return Err(Error::Contract(format!(
            "real context has provenance {}",
            real.provenance.name()
        )));
    }
    if let Some(bad) = fakes.iter().find(|f| f.provenance.is_real()) {
        return Err(Error::Contract(format!(
            "fake context {} has provenance real",
            bad.id
        )));
    }
    Ok(qas
        .iter()
        .enumerate()
        .map(|(i, qa)| {
            let shuffle_seed = seed::derive(seed, &[&real.id, &i.to_string()]);
            let (contexts, real_index) = shuffle_contexts(real, fakes, shuffle_seed);
            ContraSample {
                question: qa.question.clone(),
                gold_answers: qa.gold_answers.clone(),
                contexts,
                real_index,
                shuffle_seed,
            }
        })
        .collect())
}

/// Draw `n` distinct paragraphs from `pool`, excluding `exclude_id`.
/// The drawn paragraphs are marked as random distractors.
pub fn sample_random_contexts(
    pool: &[Paragraph],
    n: usize,
    exclude_id: &str,
    seed: u64,
) -> Result<Vec<Paragraph>> {
    if !pool.iter().any(|p| p.id == exclude_id) {
        return Err(Error::Contract(format!(
            "excluded paragraph {exclude_id} is not in the pool"
        )));
    }
    let mut seen = std::collections::HashSet::new();
    let candidates: Vec<&Paragraph> = pool
        .iter()
        .filter(|p| p.id != exclude_id && seen.insert(p.id.as_str()))
        .collect();
    if candidates.len() < n {
        return Err(Error::Contract(format!(
            "pool has {} candidates, cannot draw {n}",
            candidates.len()
        )));
    }
    let mut rng = seed::rng(seed);
    let picks = rand::seq::index::sample(&mut rng, candidates.len(), n);
    Ok(picks
        .into_iter()
        .map(|i| Paragraph {
            provenance: Provenance::RandomContext,
            ..candidates[i].clone()
        })
        .collect())
}

#[derive(Serialize, Deserialize)]
struct ContextRecord {
    text: String,
    provenance: String,
    k: Option<u32>,
}

#[derive(Serialize, Deserialize)]
struct SampleRecord {
    question: String,
    golds: Vec<String>,
    contexts: Vec<ContextRecord>,
    real_index: usize,
    shuffle_seed: u64,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<serde_json::Value>,
}

impl From<&ContraSample> for SampleRecord {
    fn from(s: &ContraSample) -> Self {
        SampleRecord {
            question: s.question.clone(),
            golds: s.gold_answers.clone(),
            contexts: s
                .contexts
                .iter()
                .map(|c| ContextRecord {
                    text: c.text.clone(),
                    provenance: c.provenance.name().to_string(),
                    k: c.provenance.k(),
                })
                .collect(),
            real_index: s.real_index,
            shuffle_seed: s.shuffle_seed,
        }
    }
}

impl TryFrom<SampleRecord> for ContraSample {
    type Error = Error;

    fn try_from(r: SampleRecord) -> Result<Self> {
        let contexts = r
            .contexts
            .into_iter()
            .map(|c| Paragraph::new(c.text, Provenance::from_parts(&c.provenance, c.k)?))
            .collect::<Result<Vec<_>>>()?;
        let sample = ContraSample {
            question: r.question,
            gold_answers: r.golds,
            contexts,
            real_index: r.real_index,
            shuffle_seed: r.shuffle_seed,
        };
        sample.check()?;
        Ok(sample)
    }
}

/// Streaming dataset writer: a header line followed by one sample per line.
pub struct DatasetWriter<W: Write> {
    out: W,
}

impl<W: Write> DatasetWriter<W> {
    pub fn new(mut out: W, meta: Option<serde_json::Value>) -> Result<Self> {
        let header = Header {
            format: DATASET_FORMAT.to_string(),
            version: DATASET_VERSION,
            meta,
        };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n").map_err(|e| Error::io("<dataset>", e))?;
        Ok(DatasetWriter { out })
    }

    pub fn write(&mut self, sample: &ContraSample) -> Result<()> {
        serde_json::to_writer(&mut self.out, &SampleRecord::from(sample))?;
        self.out
            .write_all(b"\n")
            .map_err(|e| Error::io("<dataset>", e))
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush().map_err(|e| Error::io("<dataset>", e))?;
        Ok(self.out)
    }
}

/// Streaming dataset reader; yields one sample per record line.
pub struct DatasetReader<R: BufRead> {
    lines: std::io::Lines<R>,
    line_no: usize,
    pub meta: Option<serde_json::Value>,
}

impl<R: BufRead> DatasetReader<R> {
    pub fn new(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let first = lines
            .next()
            .ok_or_else(|| Error::Format {
                offset: 0,
                message: "missing dataset header".into(),
            })?
            .map_err(|e| Error::io("<dataset>", e))?;
        let header: Header = serde_json::from_str(&first).map_err(|e| Error::Format {
            offset: 0,
            message: format!("bad dataset header: {e}"),
        })?;
        if header.format != DATASET_FORMAT {
            return Err(Error::Format {
                offset: 0,
                message: format!("unexpected format {:?}", header.format),
            });
        }
        if header.version != DATASET_VERSION {
            return Err(Error::Version {
                found: header.version,
                expected: DATASET_VERSION,
            });
        }
        Ok(DatasetReader {
            lines,
            line_no: 1,
            meta: header.meta,
        })
    }
}

impl<R: BufRead> Iterator for DatasetReader<R> {
    type Item = Result<ContraSample>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(Error::io("<dataset>", e))),
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let line_no = self.line_no;
            return Some(
                serde_json::from_str::<SampleRecord>(&line)
                    .map_err(|e| Error::Format {
                        offset: 0,
                        message: format!("line {line_no}: {e}"),
                    })
                    .and_then(ContraSample::try_from),
            );
        }
    }
}

pub fn open_dataset(path: impl AsRef<Path>) -> Result<DatasetReader<BufReader<File>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    DatasetReader::new(BufReader::new(file))
}

pub fn write_dataset(
    samples: &[ContraSample],
    path: impl AsRef<Path>,
    meta: Option<serde_json::Value>,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = DatasetWriter::new(BufWriter::new(file), meta)?;
    for s in samples {
        writer.write(s)?;
    }
    writer.finish()?;
    Ok(())
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Vec<ContraSample>> {
    open_dataset(path)?.collect()
}
