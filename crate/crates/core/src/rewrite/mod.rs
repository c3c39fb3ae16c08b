//! Fake-context generation.
//!
//! The main mode rewrites each sentence by repeating parse → mask one
//! constituent → fill, `k_iterations` times, so later edits see earlier ones.
//! Every accepted edit is recorded in an [`EditTrace`] that replays exactly.
//! The prefix mode keeps the head of a paragraph and lets a completer write
//! the rest.

mod prefix;
pub mod split;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::backend::{ConstituencyParser, FillRequest, Filler, MaskedSpan};
use crate::error::{Error, Result};
use crate::ptb::{eligible_constituents, parse_bracketed, splice, ConstituentSpan, ParseTree};
use crate::seed::Rng;
use crate::text::{char_slice, fold};

pub use prefix::{prefix_completion_rewrite, PrefixRewrite};
pub use split::sentence_split;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteConfig {
    pub k_iterations: u32,
    /// Fill attempts per chosen constituent.
    pub max_retries: u32,
    /// Constituents tried per iteration before the iteration is abandoned.
    pub max_constituents: u32,
    pub n_candidates: usize,
    pub mask_token: String,
    pub seed: u64,
    pub exclude_whole_sentence: bool,
}

impl Default for RewriteConfig {
    fn default() -> Self {
        RewriteConfig {
            k_iterations: 1,
            max_retries: 5,
            max_constituents: 3,
            n_candidates: 3,
            mask_token: "[MASK]".to_string(),
            seed: 0,
            exclude_whole_sentence: true,
        }
    }
}

impl RewriteConfig {
    pub fn with_k(k: u32) -> Self {
        RewriteConfig {
            k_iterations: k,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_iterations < 1 {
            return Err(Error::Config("K must be >= 1".into()));
        }
        if self.mask_token.is_empty() {
            return Err(Error::Config("mask token must be non-empty".into()));
        }
        if self.max_retries < 1 || self.max_constituents < 1 || self.n_candidates < 1 {
            return Err(Error::Config(
                "max_retries, max_constituents and n_candidates must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// One accepted fill. `span` indexes the sentence as it was before this step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditStep {
    pub iteration: u32,
    pub span: (usize, usize),
    pub label: String,
    pub original: String,
    pub replacement: String,
    pub retries_used: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditTrace {
    pub sentence_index: usize,
    pub steps: Vec<EditStep>,
}

impl EditTrace {
    /// Re-apply the steps to the original sentence.
    pub fn replay(&self, sentence: &str) -> Result<String> {
        let mut current = sentence.to_string();
        for step in &self.steps {
            let found = char_slice(&current, step.span.0, step.span.1)?;
            if found != step.original {
                return Err(Error::Contract(format!(
                    "trace step {} expected {:?} at {:?}, found {:?}",
                    step.iteration, step.original, step.span, found
                )));
            }
            current = splice(&current, step.span, &step.replacement)?;
        }
        Ok(current)
    }
}

/// Choose one eligible constituent uniformly and mask it.
/// `None` when the sentence has nothing maskable.
pub fn mask_constituent(
    sentence: &str,
    tree: &ParseTree,
    rng: &mut Rng,
    config: &RewriteConfig,
) -> Result<Option<(String, ConstituentSpan)>> {
    let eligible = eligible_constituents(tree, sentence, config.exclude_whole_sentence);
    if eligible.is_empty() {
        return Ok(None);
    }
    let chosen = eligible[rng.random_range(0..eligible.len())].clone();
    let masked = splice(sentence, chosen.char_span, &config.mask_token)?;
    Ok(Some((masked, chosen)))
}

/// Fill context for sentence `index`: (S1, S_{t-1}, masked S_t, S_{t+1}).
/// Missing neighbours are empty; for the first sentence S1 is the masked
/// sentence itself, so the global slot is left empty rather than leaking it.
fn fill_request(sentences: &[String], index: usize, masked: String) -> FillRequest {
    let get = |i: Option<usize>| {
        i.and_then(|i| sentences.get(i))
            .cloned()
            .unwrap_or_default()
    };
    FillRequest {
        first_sentence: if index == 0 { String::new() } else { get(Some(0)) },
        previous_sentence: get(index.checked_sub(1)),
        masked_sentence: masked,
        next_sentence: get(Some(index + 1)),
    }
}

/// Rewrite `sentences[index]` with up to `k_iterations` chained edits.
///
/// The sentence is re-parsed every iteration. A candidate is accepted when it
/// differs from the masked text (case and whitespace folded) and does not turn
/// the sentence back into its original. If every fill for a constituent is an
/// echo, another constituent is drawn, up to `max_constituents`.
pub fn rewrite_sentence(
    sentences: &[String],
    index: usize,
    filler: &dyn Filler,
    parser: &dyn ConstituencyParser,
    config: &RewriteConfig,
    rng: &mut Rng,
) -> Result<(String, EditTrace)> {
    config.validate()?;
    let original = sentences
        .get(index)
        .ok_or_else(|| Error::Contract(format!("sentence index {index} out of range")))?
        .clone();
    let original_key = fold(&original);
    let mut current = original.clone();
    let mut steps = Vec::new();

    for iteration in 1..=config.k_iterations {
        let tree = parse_bracketed(&parser.parse(&current)?, &current)?;
        let eligible = eligible_constituents(&tree, &current, config.exclude_whole_sentence);
        let mut untried: Vec<&ConstituentSpan> = eligible.iter().collect();
        let mut accepted = None;

        'constituents: for _ in 0..config.max_constituents {
            if untried.is_empty() {
                break;
            }
            let chosen = untried.swap_remove(rng.random_range(0..untried.len()));
            let masked = splice(&current, chosen.char_span, &config.mask_token)?;
            if masked.matches(config.mask_token.as_str()).count() != 1 {
                continue;
            }
            let request = fill_request(sentences, index, masked);
            let chosen_key = fold(&chosen.text);
            for attempt in 0..config.max_retries {
                let span = MaskedSpan {
                    label: chosen.label.clone(),
                    original: chosen.text.clone(),
                    mask_token: config.mask_token.clone(),
                    seed: rng.random(),
                };
                let candidates = filler.fill(&request, &span, config.n_candidates)?;
                for candidate in candidates {
                    if candidate.contains(config.mask_token.as_str()) || fold(&candidate) == chosen_key {
                        continue;
                    }
                    let next = splice(&current, chosen.char_span, &candidate)?;
                    if fold(&next) == original_key {
                        continue;
                    }
                    accepted = Some((chosen.clone(), candidate, next, attempt));
                    break 'constituents;
                }
            }
        }

        if let Some((chosen, replacement, next, attempt)) = accepted {
            steps.push(EditStep {
                iteration,
                span: chosen.char_span,
                label: chosen.label,
                original: chosen.text,
                replacement,
                retries_used: attempt,
            });
            current = next;
        } else if eligible.is_empty() {
            // Nothing to mask and the text will not change; later iterations
            // would see the same parse.
            break;
        }
    }
    if steps.is_empty() {
        log::debug!("sentence {index} left unchanged");
    }
    Ok((
        current,
        EditTrace {
            sentence_index: index,
            steps,
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParagraphRewrite {
    pub text: String,
    pub traces: Vec<EditTrace>,
}

impl ParagraphRewrite {
    pub fn step_count(&self) -> usize {
        self.traces.iter().map(|t| t.steps.len()).sum()
    }
}

/// Put rewritten sentences back in place, keeping inter-sentence whitespace.
fn reassemble(paragraph: &str, spans: &[(usize, usize)], sentences: &[String]) -> String {
    let chars: Vec<char> = paragraph.chars().collect();
    let mut out = String::with_capacity(paragraph.len());
    let mut cursor = 0;
    for ((start, end), sentence) in spans.iter().zip(sentences) {
        out.extend(&chars[cursor..*start]);
        out.push_str(sentence);
        cursor = *end;
    }
    out.extend(&chars[cursor..]);
    out
}

/// Rewrite every sentence of a paragraph in order. Later sentences see the
/// rewritten versions of earlier ones as context.
pub fn rewrite_paragraph(
    paragraph: &str,
    filler: &dyn Filler,
    parser: &dyn ConstituencyParser,
    config: &RewriteConfig,
    rng: &mut Rng,
) -> Result<ParagraphRewrite> {
    config.validate()?;
    let split = sentence_split(paragraph);
    let spans: Vec<(usize, usize)> = split.iter().map(|(_, s)| *s).collect();
    let mut sentences: Vec<String> = split.into_iter().map(|(s, _)| s).collect();
    let mut traces = Vec::with_capacity(sentences.len());
    for i in 0..sentences.len() {
        let (new, trace) = rewrite_sentence(&sentences, i, filler, parser, config, rng)?;
        sentences[i] = new;
        traces.push(trace);
    }
    Ok(ParagraphRewrite {
        text: reassemble(paragraph, &spans, &sentences),
        traces,
    })
}

/// Apply recorded traces to the original paragraph.
pub fn replay_paragraph(paragraph: &str, traces: &[EditTrace]) -> Result<String> {
    let split = sentence_split(paragraph);
    let spans: Vec<(usize, usize)> = split.iter().map(|(_, s)| *s).collect();
    let mut sentences: Vec<String> = split.into_iter().map(|(s, _)| s).collect();
    for trace in traces {
        let sentence = sentences.get_mut(trace.sentence_index).ok_or_else(|| {
            Error::Contract(format!("trace for missing sentence {}", trace.sentence_index))
        })?;
        *sentence = trace.replay(sentence)?;
    }
    Ok(reassemble(paragraph, &spans, &sentences))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{ChunkParser, GazetteerFiller, GazetteerTable, TreebankParser};
    use crate::seed;

    struct EchoFiller;

    impl Filler for EchoFiller {
        fn fill(&self, _r: &FillRequest, span: &MaskedSpan, _n: usize) -> Result<Vec<String>> {
            Ok(vec![span.original.to_uppercase()])
        }
    }

    const FIG_SENTENCE: &str =
        "The game was played on February 7, 2016 at Levi's Stadium in Santa Clara, California.";

    fn fig_table() -> GazetteerTable {
        GazetteerTable::default()
            .with_phrase("*", "February 7, 2016", &["December 7, 2015"])
            .with_phrase("*", "Santa Clara", &["Atlanta"])
            .with_phrase("*", "California", &["Georgia"])
            .with_phrase("*", "Levi's Stadium", &["the Georgia Dome"])
    }

    /// Filler table that only knows the date phrase, so K=1 has one choice.
    fn date_only() -> GazetteerFiller {
        GazetteerFiller::new(
            GazetteerTable::default().with_phrase("NP", "February 7, 2016", &["December 7, 2015"]),
        )
    }

    #[test]
    fn config_validation() {
        assert!(RewriteConfig::with_k(0).validate().is_err());
        let mut c = RewriteConfig::default();
        c.mask_token.clear();
        assert!(c.validate().is_err());
        assert!(RewriteConfig::default().validate().is_ok());
    }

    #[test]
    fn single_eligible_np_is_always_chosen() {
        let s = "the game ended";
        let t = parse_bracketed("(S (NP (DT the) (NN game)) (VBD ended))", s).unwrap();
        for seed_value in 0..20 {
            let (masked, chosen) = mask_constituent(s, &t, &mut seed::rng(seed_value), &RewriteConfig::default())
                .unwrap()
                .unwrap();
            assert_eq!(chosen.text, "the game");
            assert_eq!(masked, "[MASK] ended");
        }
    }

    #[test]
    fn terminal_only_sentence_is_not_maskable() {
        let s = "Hello !";
        let t = parse_bracketed("(S (UH Hello) (. !))", s).unwrap();
        assert!(mask_constituent(s, &t, &mut seed::rng(0), &RewriteConfig::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn fig_sentence_mask_is_seeded() {
        let tree = ChunkParser.bracket(FIG_SENTENCE);
        let t = parse_bracketed(&tree, FIG_SENTENCE).unwrap();
        let run = || {
            mask_constituent(FIG_SENTENCE, &t, &mut seed::rng(2016), &RewriteConfig::default())
                .unwrap()
                .unwrap()
        };
        assert_eq!(run(), run());
        let (masked, chosen) = run();
        assert_eq!(chosen.text, "The game");
        assert_eq!(
            masked,
            "[MASK] was played on February 7, 2016 at Levi's Stadium in Santa Clara, California."
        );
    }

    #[test]
    fn echo_filler_leaves_sentence_unchanged() {
        let sentences = vec![FIG_SENTENCE.to_string()];
        let (out, trace) = rewrite_sentence(
            &sentences,
            0,
            &EchoFiller,
            &ChunkParser,
            &RewriteConfig::with_k(3),
            &mut seed::rng(1),
        )
        .unwrap();
        assert_eq!(out, FIG_SENTENCE);
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn k1_gazetteer_date_replacement() {
        let sentences = vec![FIG_SENTENCE.to_string()];
        let (out, trace) = rewrite_sentence(
            &sentences,
            0,
            &date_only(),
            &ChunkParser,
            &RewriteConfig::with_k(1),
            &mut seed::rng(5),
        )
        .unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].original, "February 7, 2016");
        assert_eq!(trace.steps[0].replacement, "December 7, 2015");
        assert!(out.contains("December 7, 2015"));
        assert_eq!(trace.replay(FIG_SENTENCE).unwrap(), out);
    }

    #[test]
    fn k2_steps_chain() {
        // Hand-simulated: the tree bank knows the original and both one-edit
        // variants; each step must operate on the output of the previous one.
        let s0 = "The game was played at Santa Clara in California.";
        let s1 = "The game was played at Atlanta in California.";
        let s1b = "The game was played at Santa Clara in Georgia.";
        let bank = TreebankParser::from_trees([
            "(S (NP (DT The) (NN game)) (VBD was) (VBN played) (PP (IN at) (NP (NNP Santa) (NNP Clara))) (PP (IN in) (NP (NNP California))) (. .))",
            "(S (NP (DT The) (NN game)) (VBD was) (VBN played) (PP (IN at) (NP (NNP Atlanta))) (PP (IN in) (NP (NNP California))) (. .))",
            "(S (NP (DT The) (NN game)) (VBD was) (VBN played) (PP (IN at) (NP (NNP Santa) (NNP Clara))) (PP (IN in) (NP (NNP Georgia))) (. .))",
        ])
        .unwrap();
        let filler = GazetteerFiller::new(
            GazetteerTable::default()
                .with_phrase("NP", "Santa Clara", &["Atlanta"])
                .with_phrase("NP", "California", &["Georgia"]),
        );
        let sentences = vec![s0.to_string()];
        let (out, trace) = rewrite_sentence(
            &sentences,
            0,
            &filler,
            &bank,
            &RewriteConfig::with_k(2),
            &mut seed::rng(3),
        )
        .unwrap();
        assert_eq!(trace.steps.len(), 2);
        assert_eq!(out, "The game was played at Atlanta in Georgia.");
        let first = &trace.steps[0];
        let after_first = splice(s0, first.span, &first.replacement).unwrap();
        assert!(after_first == s1 || after_first == s1b);
        // The second span indexes the once-edited sentence.
        let second = &trace.steps[1];
        assert_eq!(
            char_slice(&after_first, second.span.0, second.span.1).unwrap(),
            second.original
        );
        assert_eq!(trace.replay(s0).unwrap(), out);
        assert!(trace.steps[0].iteration < trace.steps[1].iteration);
    }

    #[test]
    fn paragraph_three_sentences_k1() {
        let p = "The game was played on February 7, 2016. Fans came from Denver. It rained in Santa Clara.";
        let filler = GazetteerFiller::new(fig_table().with_label("NP", &["Boston", "the crowd"]));
        let out = rewrite_paragraph(
            p,
            &filler,
            &ChunkParser,
            &RewriteConfig::with_k(1),
            &mut seed::rng(9),
        )
        .unwrap();
        assert_eq!(out.traces.len(), 3);
        assert!(out.traces.iter().all(|t| t.steps.len() <= 1));
        assert_eq!(replay_paragraph(p, &out.traces).unwrap(), out.text);
        assert_eq!(out.text != p, out.step_count() > 0);
    }

    #[test]
    fn empty_paragraph_is_identity() {
        let out = rewrite_paragraph(
            "  ",
            &date_only(),
            &ChunkParser,
            &RewriteConfig::default(),
            &mut seed::rng(0),
        )
        .unwrap();
        assert_eq!(out.text, "  ");
        assert!(out.traces.is_empty());
    }

    #[test]
    fn fill_context_layout() {
        let s: Vec<String> = ["A one.", "B two.", "C three."].iter().map(|s| s.to_string()).collect();
        let r = fill_request(&s, 0, "[MASK] one.".into());
        assert_eq!((r.first_sentence.as_str(), r.previous_sentence.as_str(), r.next_sentence.as_str()), ("", "", "B two."));
        let r = fill_request(&s, 1, "[MASK] two.".into());
        assert_eq!((r.first_sentence.as_str(), r.previous_sentence.as_str(), r.next_sentence.as_str()), ("A one.", "A one.", "C three."));
        let r = fill_request(&s, 2, "[MASK] three.".into());
        assert_eq!(r.next_sentence, "");
    }

    #[test]
    fn backend_failure_propagates() {
        struct Down;
        impl ConstituencyParser for Down {
            fn parse(&self, _s: &str) -> Result<String> {
                Err(Error::Backend {
                    endpoint: "parse@test".into(),
                    message: "down".into(),
                })
            }
        }
        let err = rewrite_sentence(
            &["A b.".to_string()],
            0,
            &date_only(),
            &Down,
            &RewriteConfig::default(),
            &mut seed::rng(0),
        )
        .unwrap_err();
        assert!(err.is_backend());
    }
}
