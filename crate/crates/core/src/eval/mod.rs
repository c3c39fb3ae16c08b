//! Reader evaluation over contradicting contexts.

mod edit;
mod metrics;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backend::{Detector, Reader, ScoredAnswer};
use crate::error::{Error, Result};
use crate::squad::{ContraSample, Provenance};
use crate::text::char_slice;

pub use edit::{edit_metric, levenshtein};
pub use metrics::{aggregate_answer, em, f1, fuse, normalize_answer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    /// Real context only.
    Squad,
    /// Real context plus unrelated paragraphs.
    SquadRandomCtx,
    Contra,
    ContraWithDetector,
}

impl Setting {
    pub fn name(&self) -> &'static str {
        match self {
            Setting::Squad => "squad",
            Setting::SquadRandomCtx => "squad_random_ctx",
            Setting::Contra => "contra",
            Setting::ContraWithDetector => "contra_with_detector",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "squad" => Ok(Setting::Squad),
            "squad_random_ctx" => Ok(Setting::SquadRandomCtx),
            "contra" => Ok(Setting::Contra),
            "contra_with_detector" => Ok(Setting::ContraWithDetector),
            other => Err(Error::Config(format!("unknown setting {other:?}"))),
        }
    }

    pub fn uses_detector(&self) -> bool {
        matches!(self, Setting::ContraWithDetector)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub setting: Setting,
    pub lambda: f64,
    /// Keep only this many non-real contexts per sample.
    pub n_fakes: Option<usize>,
    /// Trust threshold for the detector accuracy figure.
    pub threshold: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            setting: Setting::Contra,
            lambda: 0.5,
            n_fakes: None,
            threshold: 0.5,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Config(format!("lambda {} not in [0, 1]", self.lambda)));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Config(format!("threshold {} not in [0, 1]", self.threshold)));
        }
        Ok(())
    }
}

/// Outcome for one sample that was scored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleResult {
    pub sample_index: usize,
    pub chosen_context_index: usize,
    pub chosen_provenance: String,
    pub prediction: String,
    pub em: f64,
    pub f1: f64,
    pub correct: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributionHistogram {
    pub counts: BTreeMap<String, usize>,
    pub total_wrong: usize,
}

/// Count wrong answers by the provenance of the context they came from.
pub fn attribute_errors(samples: &[ContraSample], results: &[SampleResult]) -> Result<AttributionHistogram> {
    let mut hist = AttributionHistogram::default();
    for r in results.iter().filter(|r| !r.correct) {
        let sample = samples
            .get(r.sample_index)
            .ok_or_else(|| Error::Contract(format!("no sample {}", r.sample_index)))?;
        let context = sample.contexts.get(r.chosen_context_index).ok_or_else(|| {
            Error::Contract(format!(
                "sample {} has no context {}",
                r.sample_index, r.chosen_context_index
            ))
        })?;
        *hist.counts.entry(context.provenance.class_key()).or_default() += 1;
        hist.total_wrong += 1;
    }
    Ok(hist)
}

/// Percentage of paragraphs classified correctly when "real" is predicted
/// iff `trust >= threshold`.
pub fn detector_eval(trust: &[f64], is_real: &[bool], threshold: f64) -> Result<f64> {
    if trust.len() != is_real.len() {
        return Err(Error::Contract(format!(
            "{} trust scores for {} labels",
            trust.len(),
            is_real.len()
        )));
    }
    if trust.is_empty() {
        return Ok(0.0);
    }
    let right = trust
        .iter()
        .zip(is_real)
        .filter(|(t, real)| (**t >= threshold) == **real)
        .count();
    Ok(100.0 * right as f64 / trust.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub setting: Setting,
    pub n_fakes: Option<usize>,
    pub lambda: f64,
    pub em: f64,
    pub f1: f64,
    pub n_samples: usize,
    pub n_errored: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector_accuracy: Option<f64>,
    pub attribution: AttributionHistogram,
    pub per_sample: Vec<SampleResult>,
}

struct Scored {
    result: SampleResult,
    trust: Vec<(String, bool, f64)>,
}

fn score_sample(
    index: usize,
    sample: &ContraSample,
    reader: &dyn Reader,
    detector: Option<&dyn Detector>,
    lambda: f64,
) -> Result<Scored> {
    let mut candidates = Vec::with_capacity(sample.contexts.len());
    let mut trust = Vec::new();
    for (i, context) in sample.contexts.iter().enumerate() {
        let mut answer: ScoredAnswer = reader.read(&sample.question, &context.text)?;
        if char_slice(&context.text, answer.char_span.0, answer.char_span.1)? != answer.text {
            return Err(Error::Contract(format!(
                "reader span {:?} does not match its text",
                answer.char_span
            )));
        }
        answer.context_index = i;
        if let Some(d) = detector {
            let r = d.detect(context)?;
            trust.push((context.id.clone(), context.provenance.is_real(), r));
            answer.trust_score = r;
            answer.fused_score = fuse(answer.span_score, r, lambda);
        }
        candidates.push(answer);
    }
    let best = aggregate_answer(&candidates, detector.is_some())
        .ok_or_else(|| Error::Contract("sample has no contexts".into()))?;
    let em = em(&best.text, &sample.gold_answers);
    Ok(Scored {
        result: SampleResult {
            sample_index: index,
            chosen_context_index: best.context_index,
            chosen_provenance: sample.contexts[best.context_index].provenance.class_key(),
            prediction: best.text.clone(),
            em,
            f1: f1(&best.text, &sample.gold_answers),
            correct: em == 1.0,
        },
        trust,
    })
}

/// Evaluate `reader` (and the detector, in the detector setting) on every
/// sample. Samples whose reader or detector call fails are excluded and
/// counted in `n_errored`.
pub fn run_evaluation(
    samples: &[ContraSample],
    reader: &dyn Reader,
    detector: Option<&dyn Detector>,
    config: &EvalConfig,
) -> Result<EvalReport> {
    config.validate()?;
    let detector = if config.setting.uses_detector() {
        Some(detector.ok_or_else(|| Error::Config("detector setting needs a detector".into()))?)
    } else {
        None
    };
    if config.setting == Setting::SquadRandomCtx
        && samples
            .iter()
            .flat_map(|s| &s.contexts)
            .any(|c| !matches!(c.provenance, Provenance::Real | Provenance::RandomContext))
    {
        log::warn!("random-context setting evaluated on a dataset containing fakes");
    }
    let prepared: Vec<ContraSample> = samples
        .iter()
        .map(|s| match (config.setting, config.n_fakes) {
            (Setting::Squad, _) => s.truncate_fakes(0),
            (_, Some(n)) => s.truncate_fakes(n),
            (_, None) => s.clone(),
        })
        .collect();

    let outcomes: Vec<Result<Scored>> = prepared
        .par_iter()
        .enumerate()
        .map(|(i, s)| score_sample(i, s, reader, detector, config.lambda))
        .collect();

    let mut per_sample = Vec::new();
    let mut n_errored = 0;
    let mut trust = BTreeMap::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(scored) => {
                for (id, real, r) in scored.trust {
                    trust.insert((id, real), r);
                }
                per_sample.push(scored.result);
            }
            Err(e) => {
                log::warn!("sample {i} errored: {e}");
                n_errored += 1;
            }
        }
    }
    let n = per_sample.len();
    let mean = |f: fn(&SampleResult) -> f64| {
        if n == 0 {
            0.0
        } else {
            100.0 * per_sample.iter().map(f).sum::<f64>() / n as f64
        }
    };
    let detector_accuracy = if detector.is_some() {
        let (labels, scores): (Vec<bool>, Vec<f64>) =
            trust.iter().map(|((_, real), r)| (*real, *r)).unzip();
        Some(detector_eval(&scores, &labels, config.threshold)?)
    } else {
        None
    };
    Ok(EvalReport {
        setting: config.setting,
        n_fakes: config.n_fakes,
        lambda: config.lambda,
        em: mean(|r| r.em),
        f1: mean(|r| r.f1),
        n_samples: n,
        n_errored,
        detector_accuracy,
        attribution: attribute_errors(&prepared, &per_sample)?,
        per_sample,
    })
}

/// One report per fake count in `ns`, each on nested context subsets.
pub fn run_sweep(
    samples: &[ContraSample],
    reader: &dyn Reader,
    detector: Option<&dyn Detector>,
    config: &EvalConfig,
    ns: &[usize],
) -> Result<Vec<EvalReport>> {
    ns.iter()
        .map(|&n| {
            let c = EvalConfig {
                n_fakes: Some(n),
                ..config.clone()
            };
            run_evaluation(samples, reader, detector, &c)
        })
        .collect()
}

/// Plain-text table with one row per report.
pub fn render_table(reports: &[EvalReport]) -> String {
    let header = ["setting", "N", "lambda", "samples", "errored", "EM", "F1", "det.acc"];
    let rows: Vec<[String; 8]> = reports
        .iter()
        .map(|r| {
            [
                r.setting.name().to_string(),
                r.n_fakes.map_or("all".into(), |n| n.to_string()),
                format!("{:.2}", r.lambda),
                r.n_samples.to_string(),
                r.n_errored.to_string(),
                format!("{:.2}", r.em),
                format!("{:.2}", r.f1),
                r.detector_accuracy.map_or("-".into(), |a| format!("{a:.2}")),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |cells: &[String], out: &mut String| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(&header.map(String::from), &mut out);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    line(&rule, &mut out);
    for row in &rows {
        line(row, &mut out);
    }
    out
}

/// Distinct provenance classes present among a sample set, for summaries.
pub fn provenance_classes(samples: &[ContraSample]) -> BTreeSet<String> {
    samples
        .iter()
        .flat_map(|s| s.contexts.iter().map(|c| c.provenance.class_key()))
        .collect()
}
