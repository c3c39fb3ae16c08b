//! Deterministic stand-ins for the model backends.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{
    Completer, ConstituencyParser, Detector, FillRequest, Filler, MaskedSpan, Reader,
    ScoredAnswer,
};
use crate::error::{Error, Result};
use crate::rewrite::split::sentence_split;
use crate::seed;
use crate::squad::{paragraph_id, Paragraph};
use crate::text::{char_slice, fold};

// ---------------------------------------------------------------------------
// Gazetteer filler

/// Replacement pools keyed by phrase (label + original text) or by label.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GazetteerTable {
    #[serde(default)]
    pub phrases: Vec<PhraseEntry>,
    #[serde(default)]
    pub labels: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhraseEntry {
    /// Constituent label, or `*` for any label.
    pub label: String,
    pub original: String,
    pub pool: Vec<String>,
}

impl GazetteerTable {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn with_phrase(mut self, label: &str, original: &str, pool: &[&str]) -> Self {
        self.phrases.push(PhraseEntry {
            label: label.to_string(),
            original: original.to_string(),
            pool: pool.iter().map(|s| s.to_string()).collect(),
        });
        self
    }

    pub fn with_label(mut self, label: &str, pool: &[&str]) -> Self {
        self.labels
            .entry(label.to_string())
            .or_default()
            .extend(pool.iter().map(|s| s.to_string()));
        self
    }

    /// The pool for a masked phrase: exact phrase, then wildcard phrase, then label.
    pub fn pool(&self, label: &str, original: &str) -> Option<&[String]> {
        let key = fold(original);
        let by_phrase = |want: &str| {
            self.phrases
                .iter()
                .find(|e| e.label == want && fold(&e.original) == key)
                .map(|e| e.pool.as_slice())
        };
        by_phrase(label)
            .or_else(|| by_phrase("*"))
            .or_else(|| self.labels.get(label).map(|p| p.as_slice()))
    }

    /// Distinct pool entries that differ from `original`, shuffled by `rng`.
    pub fn candidates(&self, label: &str, original: &str, rng: &mut seed::Rng) -> Vec<String> {
        let Some(pool) = self.pool(label, original) else {
            return Vec::new();
        };
        let key = fold(original);
        let mut seen = HashSet::new();
        let mut usable: Vec<String> = pool
            .iter()
            .filter(|e| fold(e) != key && seen.insert(fold(e)))
            .cloned()
            .collect();
        usable.shuffle(rng);
        usable
    }
}

/// Draw one replacement for a masked phrase; `None` when no pool entry differs
/// from the original.
pub fn gazetteer_fill(
    masked_label: &str,
    original: &str,
    table: &GazetteerTable,
    rng: &mut seed::Rng,
) -> Option<String> {
    let Some(pool) = table.pool(masked_label, original) else {
        return None;
    };
    let key = fold(original);
    let mut seen = HashSet::new();
    let usable: Vec<&String> = pool
        .iter()
        .filter(|e| fold(e) != key && seen.insert(fold(e)))
        .collect();
    if usable.is_empty() {
        return None;
    }
    Some(usable[rng.random_range(0..usable.len())].clone())
}

pub struct GazetteerFiller {
    pub table: GazetteerTable,
}

impl GazetteerFiller {
    pub fn new(table: GazetteerTable) -> Self {
        GazetteerFiller { table }
    }
}

impl Filler for GazetteerFiller {
    fn fill(&self, _request: &FillRequest, span: &MaskedSpan, n: usize) -> Result<Vec<String>> {
        let mut rng = seed::rng(span.seed);
        let mut out = self.table.candidates(&span.label, &span.original, &mut rng);
        out.truncate(n);
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Overlap reader

/// Whitespace tokens with surrounding punctuation stripped, as char spans.
fn content_tokens(text: &str, offset: usize) -> Vec<(String, (usize, usize))> {
    crate::text::whitespace_tokens(text)
        .into_iter()
        .filter_map(|(s, e)| {
            let word: Vec<char> = text.chars().skip(s).take(e - s).collect();
            let lead = word.iter().take_while(|c| !c.is_alphanumeric()).count();
            if lead == word.len() {
                return None;
            }
            let trail = word.iter().rev().take_while(|c| !c.is_alphanumeric()).count();
            let tok: String = word[lead..word.len() - trail].iter().collect();
            Some((tok, (offset + s + lead, offset + e - trail)))
        })
        .collect()
}

/// Pick the sentence sharing the most question tokens and answer with the
/// longest run of tokens that do not occur in the question.
///
/// Token comparison is exact (case-sensitive). The score is the fraction of
/// question tokens found in the chosen sentence.
pub fn overlap_read(question: &str, paragraph: &str, max_span_tokens: usize) -> ScoredAnswer {
    let q_tokens: Vec<String> = content_tokens(question, 0).into_iter().map(|t| t.0).collect();
    let q_set: HashSet<&str> = q_tokens.iter().map(|s| s.as_str()).collect();
    let sentences = sentence_split(paragraph);
    if sentences.is_empty() {
        return ScoredAnswer::new(String::new(), (0, 0), 0.0);
    }

    let mut best: Option<(usize, Vec<(String, (usize, usize))>)> = None;
    for (text, (start, _)) in &sentences {
        let toks = content_tokens(text, *start);
        let s_set: HashSet<&str> = toks.iter().map(|t| t.0.as_str()).collect();
        let overlap = q_tokens.iter().filter(|t| s_set.contains(t.as_str())).count();
        if best.as_ref().map_or(true, |(b, _)| overlap > *b) {
            best = Some((overlap, toks));
        }
    }
    let (overlap, toks) = best.unwrap_or_default();
    let score = if q_tokens.is_empty() {
        0.0
    } else {
        (overlap as f64 / q_tokens.len() as f64).clamp(0.0, 1.0)
    };

    // Longest run of tokens absent from the question; earliest on ties.
    let mut best_run = (0usize, 0usize);
    let mut run_start = None;
    for i in 0..=toks.len() {
        let absent = i < toks.len() && !q_set.contains(toks[i].0.as_str());
        match (absent, run_start) {
            (true, None) => run_start = Some(i),
            (false, Some(s)) => {
                if i - s > best_run.1 - best_run.0 {
                    best_run = (s, i);
                }
                run_start = None;
            }
            _ => {}
        }
    }
    let (a, mut b) = best_run;
    if b - a > max_span_tokens {
        b = a + max_span_tokens;
    }
    let span = if a < b {
        (toks[a].1 .0, toks[b - 1].1 .1)
    } else {
        let s = sentences[0].1 .0;
        (s, s)
    };
    let text = char_slice(paragraph, span.0, span.1)
        .map(str::to_string)
        .unwrap_or_default();
    ScoredAnswer::new(text, span, score)
}

pub struct OverlapReader {
    pub max_span_tokens: usize,
}

impl Default for OverlapReader {
    fn default() -> Self {
        OverlapReader { max_span_tokens: 10 }
    }
}

impl Reader for OverlapReader {
    fn read(&self, question: &str, paragraph: &str) -> Result<ScoredAnswer> {
        Ok(overlap_read(question, paragraph, self.max_span_tokens))
    }
}

// ---------------------------------------------------------------------------
// Detectors

/// Upper-bound detector that reads provenance directly.
pub fn oracle_detect(context: &Paragraph) -> f64 {
    if context.provenance.is_real() {
        1.0
    } else {
        0.0
    }
}

pub struct OracleDetector;

impl Detector for OracleDetector {
    fn detect(&self, context: &Paragraph) -> Result<f64> {
        Ok(oracle_detect(context))
    }
}

/// Trusts exactly the paragraphs whose identity is in a known-real set.
/// Serves the oracle over the wire, where provenance is not transmitted.
#[derive(Default)]
pub struct LookupDetector {
    real_ids: HashSet<String>,
}

impl LookupDetector {
    pub fn new<'a>(real_texts: impl IntoIterator<Item = &'a str>) -> Self {
        LookupDetector {
            real_ids: real_texts.into_iter().map(paragraph_id).collect(),
        }
    }

    pub fn trust(&self, text: &str) -> f64 {
        if self.real_ids.contains(&paragraph_id(text)) {
            1.0
        } else {
            0.0
        }
    }
}

impl Detector for LookupDetector {
    fn detect(&self, context: &Paragraph) -> Result<f64> {
        Ok(self.trust(&context.text))
    }
}

// ---------------------------------------------------------------------------
// Parsers

const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "its", "their", "his", "her", "our",
];
const PREPOSITIONS: &[&str] = &[
    "of", "in", "on", "at", "by", "for", "with", "from", "to", "into", "during", "after",
    "before", "over", "under", "between", "through", "about", "against", "near", "since",
    "until", "within", "without", "across", "along", "around", "behind",
];
const CONJUNCTIONS: &[&str] = &["and", "or", "but", "nor", "yet", "so"];
const AUXILIARIES: &[&str] = &[
    "is", "was", "were", "are", "be", "been", "being", "has", "had", "have", "do", "did", "does",
    "will", "would", "can", "could", "may", "might", "must", "should", "shall", "not",
];

const IRREGULAR_VERBS: &[&str] = &[
    "won", "beat", "lost", "took", "made", "held", "became", "began", "came", "went", "said",
    "saw", "gave", "led", "left", "met", "ran", "won't", "wrote", "built", "fought", "sold",
    "bought", "brought", "told", "found", "kept", "struck", "drew", "threw", "chose", "rose",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tag {
    Det,
    Prep,
    Conj,
    Aux,
    Verb,
    Adv,
    Num,
    Proper,
    Noun,
    Comma,
    Punct,
}

fn is_bracket(c: char) -> bool {
    matches!(c, '(' | ')' | '[' | ']' | '{' | '}')
}

fn split_punct(word: &str) -> Vec<String> {
    let mut out = Vec::new();
    for piece in word.split_inclusive(is_bracket) {
        let (body, bracket) = match piece.chars().last() {
            Some(c) if is_bracket(c) => (&piece[..piece.len() - c.len_utf8()], Some(c)),
            _ => (piece, None),
        };
        let chars: Vec<char> = body.chars().collect();
        let lead = chars.iter().take_while(|c| !c.is_alphanumeric()).count();
        if lead == chars.len() {
            out.extend(chars.iter().map(|c| c.to_string()));
        } else {
            let trail = chars.iter().rev().take_while(|c| !c.is_alphanumeric()).count();
            out.extend(chars[..lead].iter().map(|c| c.to_string()));
            out.push(chars[lead..chars.len() - trail].iter().collect());
            out.extend(chars[chars.len() - trail..].iter().map(|c| c.to_string()));
        }
        if let Some(b) = bracket {
            out.push(b.to_string());
        }
    }
    out
}

fn tag(token: &str) -> Tag {
    let lower = token.to_lowercase();
    let first = token.chars().next().unwrap_or(' ');
    if token == "," {
        Tag::Comma
    } else if !first.is_alphanumeric() {
        Tag::Punct
    } else if DETERMINERS.contains(&lower.as_str()) {
        Tag::Det
    } else if PREPOSITIONS.contains(&lower.as_str()) {
        Tag::Prep
    } else if CONJUNCTIONS.contains(&lower.as_str()) {
        Tag::Conj
    } else if AUXILIARIES.contains(&lower.as_str()) {
        Tag::Aux
    } else if token.chars().any(|c| c.is_ascii_digit()) {
        Tag::Num
    } else if first.is_uppercase() {
        Tag::Proper
    } else if IRREGULAR_VERBS.contains(&lower.as_str())
        || (lower.len() > 3 && lower.ends_with("ed") && !lower.ends_with("eed"))
    {
        Tag::Verb
    } else if lower.len() > 3 && lower.ends_with("ly") {
        Tag::Adv
    } else {
        Tag::Noun
    }
}

fn escape(token: &str) -> String {
    match token {
        "(" => "-LRB-".into(),
        ")" => "-RRB-".into(),
        "[" => "-LSB-".into(),
        "]" => "-RSB-".into(),
        "{" => "-LCB-".into(),
        "}" => "-RCB-".into(),
        _ => token.into(),
    }
}

fn leaf(tag: Tag, token: &str) -> String {
    let pos = match tag {
        Tag::Det => "DT".to_string(),
        Tag::Prep => "IN".into(),
        Tag::Conj => "CC".into(),
        Tag::Aux | Tag::Verb => "VBD".into(),
        Tag::Adv => "RB".into(),
        Tag::Num => "CD".into(),
        Tag::Proper => "NNP".into(),
        Tag::Noun => "NN".into(),
        Tag::Comma => ",".into(),
        Tag::Punct => match token {
            "." | "!" | "?" => ".".into(),
            _ => escape(token),
        },
    };
    format!("({pos} {})", escape(token))
}

/// A shallow rule-based chunker producing PTB brackets.
///
/// Noun phrases are an optional determiner followed by content words (commas
/// allowed inside number sequences such as dates); a preposition followed by
/// a noun phrase forms a PP; a past-tense verb followed by a noun phrase forms
/// a VP; everything else hangs off `S`.
#[derive(Debug, Default, Clone, Copy)]
pub struct ChunkParser;

impl ChunkParser {
    pub fn bracket(&self, sentence: &str) -> String {
        let tokens: Vec<String> = sentence.split_whitespace().flat_map(split_punct).collect();
        let tags: Vec<Tag> = tokens.iter().map(|t| tag(t)).collect();
        let nominal = |t: Tag| matches!(t, Tag::Num | Tag::Proper | Tag::Noun);

        // Returns the end of an NP starting at `i`, if any.
        let np_end = |i: usize| -> Option<usize> {
            let mut j = i;
            if j < tags.len() && tags[j] == Tag::Det {
                j += 1;
            }
            let body = j;
            while j < tags.len() {
                if nominal(tags[j]) {
                    j += 1;
                } else if tags[j] == Tag::Comma
                    && j > body
                    && matches!(tags[j - 1], Tag::Num | Tag::Proper)
                    && j + 1 < tags.len()
                    && tags[j + 1] == Tag::Num
                {
                    j += 1;
                } else {
                    break;
                }
            }
            (j > body).then_some(j)
        };
        let np = |a: usize, b: usize| -> String {
            let inner: Vec<String> = (a..b).map(|k| leaf(tags[k], &tokens[k])).collect();
            format!("(NP {})", inner.join(" "))
        };

        let mut parts = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            if tags[i] == Tag::Prep {
                if let Some(e) = np_end(i + 1) {
                    parts.push(format!("(PP {} {})", leaf(Tag::Prep, &tokens[i]), np(i + 1, e)));
                    i = e;
                    continue;
                }
            }
            if tags[i] == Tag::Verb {
                if let Some(e) = np_end(i + 1) {
                    parts.push(format!("(VP {} {})", leaf(Tag::Verb, &tokens[i]), np(i + 1, e)));
                    i = e;
                    continue;
                }
            }
            if let Some(e) = np_end(i) {
                parts.push(np(i, e));
                i = e;
                continue;
            }
            parts.push(leaf(tags[i], &tokens[i]));
            i += 1;
        }
        if parts.is_empty() {
            return "(S )".into();
        }
        format!("(S {})", parts.join(" "))
    }
}

impl ConstituencyParser for ChunkParser {
    fn parse(&self, sentence: &str) -> Result<String> {
        if sentence.trim().is_empty() {
            return Err(Error::Contract("cannot parse an empty sentence".into()));
        }
        Ok(self.bracket(sentence))
    }
}

fn compact_key(text: &str) -> String {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '\u{201c}' | '\u{201d}' => '"',
            '\u{2018}' | '\u{2019}' => '\'',
            c => c,
        })
        .collect()
}

fn yield_key(tree: &str) -> Result<String> {
    let mut key = String::new();
    let mut depth = 0i32;
    let mut after_open = false;
    let spaced = tree.replace('(', " ( ").replace(')', " ) ");
    for atom in spaced.split_whitespace() {
        match atom {
            "(" => {
                depth += 1;
                after_open = true;
            }
            ")" => {
                depth -= 1;
                after_open = false;
                if depth < 0 {
                    break;
                }
            }
            // The first atom after '(' is a label.
            _ if after_open => after_open = false,
            token => key.push_str(match token.to_ascii_uppercase().as_str() {
                "-LRB-" => "(",
                "-RRB-" => ")",
                "-LSB-" => "[",
                "-RSB-" => "]",
                "-LCB-" => "{",
                "-RCB-" => "}",
                "``" | "''" => "\"",
                _ => token,
            }),
        }
    }
    if depth != 0 {
        return Err(Error::TreeParse {
            position: tree.chars().count(),
            message: "unbalanced brackets".into(),
        });
    }
    Ok(key)
}

/// Looks sentences up in a set of pre-computed trees (one bracketed tree per
/// line), matching on the whitespace-free leaf yield.
#[derive(Debug, Default, Clone)]
pub struct TreebankParser {
    trees: HashMap<String, String>,
}

impl TreebankParser {
    pub fn from_trees<'a>(trees: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut map = HashMap::new();
        for t in trees {
            let t = t.trim();
            if t.is_empty() {
                continue;
            }
            map.insert(compact_key(&yield_key(t)?), t.to_string());
        }
        Ok(TreebankParser { trees: map })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_trees(text.lines())
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }
}

impl ConstituencyParser for TreebankParser {
    fn parse(&self, sentence: &str) -> Result<String> {
        self.trees
            .get(&compact_key(sentence))
            .cloned()
            .ok_or_else(|| Error::Backend {
                endpoint: "treebank".into(),
                message: format!("no tree for sentence {sentence:?}"),
            })
    }
}

// ---------------------------------------------------------------------------
// Completer

/// Word-bigram continuation model fit on a corpus. The continuation is drawn
/// with a seed derived from the prompt, so it is a pure function of the prompt.
#[derive(Debug, Clone)]
pub struct BigramCompleter {
    successors: HashMap<String, Vec<String>>,
    starts: Vec<String>,
    pub max_tokens: usize,
    pub seed: u64,
}

impl BigramCompleter {
    pub fn fit<'a>(corpus: impl IntoIterator<Item = &'a str>, seed: u64) -> Self {
        let mut successors: HashMap<String, Vec<String>> = HashMap::new();
        let mut starts = Vec::new();
        for text in corpus {
            let words: Vec<&str> = text.split_whitespace().collect();
            if let Some(first) = words.first() {
                starts.push(first.to_string());
            }
            for pair in words.windows(2) {
                successors
                    .entry(pair[0].to_string())
                    .or_default()
                    .push(pair[1].to_string());
            }
        }
        BigramCompleter {
            successors,
            starts,
            max_tokens: 80,
            seed,
        }
    }
}

impl Completer for BigramCompleter {
    fn complete(&self, prompt: &str) -> Result<String> {
        let mut rng = seed::rng(seed::derive(self.seed, &[prompt]));
        let mut current = match prompt.split_whitespace().last() {
            Some(w) => w.to_string(),
            None => match self.starts.first() {
                Some(w) => w.clone(),
                None => return Ok(String::new()),
            },
        };
        let mut out = String::new();
        for _ in 0..self.max_tokens {
            let Some(next) = self.successors.get(&current) else {
                break;
            };
            let word = next[rng.random_range(0..next.len())].clone();
            out.push(' ');
            out.push_str(&word);
            current = word;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ptb::{eligible_constituents, parse_bracketed};

    #[test]
    fn gazetteer_cases() {
        let table = GazetteerTable::default().with_phrase("NP", "Santa Clara", &["Atlanta"]);
        let mut rng = seed::rng(0);
        assert_eq!(
            gazetteer_fill("NP", "Santa Clara", &table, &mut rng).as_deref(),
            Some("Atlanta")
        );
        let only_self = GazetteerTable::default().with_phrase("NP", "Atlanta", &["atlanta "]);
        assert_eq!(gazetteer_fill("NP", "Atlanta", &only_self, &mut rng), None);
        assert_eq!(gazetteer_fill("VP", "ran", &table, &mut rng), None);
    }

    #[test]
    fn gazetteer_seeded_draw_is_stable() {
        let table = GazetteerTable::default().with_label("NP", &["Denver", "Boston", "Miami"]);
        let draw = |s| gazetteer_fill("NP", "Santa Clara", &table, &mut seed::rng(s)).unwrap();
        assert_eq!(draw(7), draw(7));
        assert_eq!(draw(7), "Denver");
    }

    #[test]
    fn gazetteer_lookup_order() {
        let table = GazetteerTable::default()
            .with_phrase("*", "Santa Clara", &["Atlanta"])
            .with_phrase("NP", "Santa Clara", &["Boston"])
            .with_label("NP", &["Miami"]);
        assert_eq!(table.pool("NP", "santa  clara").unwrap(), ["Boston"]);
        assert_eq!(table.pool("PP", "Santa Clara").unwrap(), ["Atlanta"]);
        assert_eq!(table.pool("NP", "Denver").unwrap(), ["Miami"]);
    }

    #[test]
    fn overlap_reader_hand_example() {
        let a = overlap_read("who won the game", "The Broncos won the game.", 10);
        assert_eq!(a.text, "The Broncos");
        assert_eq!(a.char_span, (0, 11));
        assert_eq!(a.span_score, 0.75);
    }

    #[test]
    fn overlap_reader_disjoint_falls_back_to_first_sentence() {
        let a = overlap_read("zebra?", "Alpha beta. Gamma delta epsilon.", 10);
        assert_eq!(a.span_score, 0.0);
        assert_eq!(a.text, "Alpha beta");
    }

    #[test]
    fn overlap_reader_caps_and_picks_best_sentence() {
        let p = "Nothing here. The winner of the game was the Denver Broncos team.";
        let a = overlap_read("Who was the winner of the game?", p, 2);
        assert_eq!(a.text, "Denver Broncos");
        assert!(a.span_score > 0.5);
        assert_eq!(char_slice(p, a.char_span.0, a.char_span.1).unwrap(), a.text);
        assert_eq!(overlap_read("q", "", 10).char_span, (0, 0));
    }

    #[test]
    fn oracle_scores() {
        use crate::squad::Provenance;
        let p = |prov| Paragraph::new("x", prov).unwrap();
        assert_eq!(oracle_detect(&p(Provenance::Real)), 1.0);
        assert_eq!(oracle_detect(&p(Provenance::HumanFake)), 0.0);
        assert_eq!(oracle_detect(&p(Provenance::ModelFake { k: 2 })), 0.0);
    }

    #[test]
    fn chunk_parser_trees_align() {
        let s = "The game was played on February 7, 2016 at Levi's Stadium (in California).";
        let tree = ChunkParser.parse(s).unwrap();
        let t = parse_bracketed(&tree, s).unwrap();
        let spans: Vec<(String, String)> = eligible_constituents(&t, s, true)
            .into_iter()
            .map(|c| (c.label, c.text))
            .collect();
        assert!(spans.contains(&("PP".into(), "on February 7, 2016".into())));
        assert!(spans.contains(&("NP".into(), "February 7, 2016".into())));
        assert!(spans.contains(&("NP".into(), "Levi's Stadium".into())));
        assert!(spans.contains(&("NP".into(), "The game".into())));
    }

    #[test]
    fn chunk_parser_verb_phrases() {
        assert_eq!(
            ChunkParser.bracket("Denver Broncos won the final in Paris."),
            "(S (NP (NNP Denver) (NNP Broncos)) (VP (VBD won) (NP (DT the) (NN final))) (PP (IN in) (NP (NNP Paris))) (. .))"
        );
        assert_eq!(
            ChunkParser.bracket("The crowd cheered loudly."),
            "(S (NP (DT The) (NN crowd)) (VBD cheered) (RB loudly) (. .))"
        );
    }

    #[test]
    fn treebank_lookup() {
        let bank = TreebankParser::from_trees([
            "(S (NP (NNP Tesla)) (VP (VBD worked) (NP (-LRB- -LRB-) (NN daily) (-RRB- -RRB-))) (. .))",
        ])
        .unwrap();
        assert!(bank.parse("Tesla worked (daily).").is_ok());
        assert!(bank.parse("Tesla  worked ( daily ) .").is_ok());
        assert!(bank.parse("Edison worked.").is_err());
    }

    #[test]
    fn bigram_completer_is_deterministic() {
        let c = BigramCompleter::fit(["the cat sat on the mat", "the dog sat on the rug"], 3);
        let a = c.complete("the cat").unwrap();
        assert_eq!(a, c.complete("the cat").unwrap());
        assert!(a.starts_with(' '));
        assert_eq!(c.complete("zzz").unwrap(), "");
    }
}
