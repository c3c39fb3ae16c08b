//! Gap constituency filling: self-supervised training pairs for the filler.
//!
//! For each interior sentence `S_t` (1-based `t` in `2..=T-1`) one eligible
//! constituent is masked; the model input is `(S1, S_{t-1}, masked S_t,
//! S_{t+1})` and the target is the masked text.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backend::ConstituencyParser;
use crate::error::{Error, Result};
use crate::ptb::{eligible_constituents, parse_bracketed, splice};
use crate::rewrite::sentence_split;
use crate::seed;
use crate::text::whitespace_tokens;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcfConfig {
    pub mask_token: String,
    pub separator: String,
    pub min_sentences: usize,
    pub max_sentence_tokens: usize,
    pub exclude_whole_sentence: bool,
}

impl Default for GcfConfig {
    fn default() -> Self {
        GcfConfig {
            mask_token: "[MASK]".into(),
            separator: "</s>".into(),
            min_sentences: 3,
            max_sentence_tokens: 128,
            exclude_whole_sentence: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcfSegments {
    pub s1: String,
    pub s_prev: String,
    pub masked_st: String,
    pub s_next: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcfExample {
    pub article_id: String,
    /// 1-based sentence index.
    pub t: usize,
    pub input_segments: GcfSegments,
    pub target: String,
    /// 1-based inclusive whitespace-token range touched by the masked span.
    pub a: usize,
    pub b: usize,
}

impl GcfExample {
    /// Put the target back in place of the mask.
    pub fn reconstruct(&self, mask_token: &str) -> Result<String> {
        let masked = &self.input_segments.masked_st;
        if masked.matches(mask_token).count() != 1 {
            return Err(Error::Contract(format!(
                "example {}#{} does not contain exactly one mask",
                self.article_id, self.t
            )));
        }
        Ok(masked.replacen(mask_token, &self.target, 1))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcfStats {
    pub articles: usize,
    pub short_articles: usize,
    pub examples: usize,
    /// Interior sentences with nothing maskable.
    pub unmaskable: usize,
    /// Interior sentences over the token limit or already containing the mask.
    pub filtered: usize,
    /// Records not written because they would corrupt a training line.
    pub rejected: usize,
}

impl GcfStats {
    fn add(&mut self, other: &GcfStats) {
        self.articles += other.articles;
        self.short_articles += other.short_articles;
        self.examples += other.examples;
        self.unmaskable += other.unmaskable;
        self.filtered += other.filtered;
        self.rejected += other.rejected;
    }
}

/// Build at most one example per interior sentence of one article.
pub fn build_examples(
    article_id: &str,
    sentences: &[String],
    parser: &dyn ConstituencyParser,
    config: &GcfConfig,
    rng: &mut seed::Rng,
) -> Result<(Vec<GcfExample>, GcfStats)> {
    let mut stats = GcfStats {
        articles: 1,
        ..Default::default()
    };
    let total = sentences.len();
    if total < config.min_sentences.max(3) {
        stats.short_articles = 1;
        return Ok((Vec::new(), stats));
    }
    let mut examples = Vec::new();
    for t in 2..total {
        let sentence = &sentences[t - 1];
        let tokens = whitespace_tokens(sentence);
        if tokens.len() > config.max_sentence_tokens || sentence.contains(config.mask_token.as_str()) {
            stats.filtered += 1;
            continue;
        }
        let tree = match parse_bracketed(&parser.parse(sentence)?, sentence) {
            Ok(tree) => tree,
            Err(e @ (Error::TreeParse { .. } | Error::Alignment { .. })) => {
                log::warn!("{article_id} sentence {t}: {e}");
                stats.unmaskable += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let eligible = eligible_constituents(&tree, sentence, config.exclude_whole_sentence);
        if eligible.is_empty() {
            stats.unmaskable += 1;
            continue;
        }
        let chosen = &eligible[rng.random_range(0..eligible.len())];
        let (start, end) = chosen.char_span;
        let a = tokens.iter().position(|&(_, te)| te > start).unwrap_or(0) + 1;
        let b = tokens.iter().rposition(|&(ts, _)| ts < end).unwrap_or(0) + 1;
        examples.push(GcfExample {
            article_id: article_id.to_string(),
            t,
            input_segments: GcfSegments {
                s1: sentences[0].clone(),
                s_prev: sentences[t - 2].clone(),
                masked_st: splice(sentence, chosen.char_span, &config.mask_token)?,
                s_next: sentences[t].clone(),
            },
            target: chosen.text.clone(),
            a,
            b,
        });
    }
    stats.examples = examples.len();
    Ok((examples, stats))
}

/// One seq2seq training line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingRecord {
    pub input: String,
    pub output: String,
}

impl TrainingRecord {
    pub fn from_example(example: &GcfExample, config: &GcfConfig) -> Result<Self> {
        if example.target.contains(config.mask_token.as_str()) {
            return Err(Error::Contract(format!(
                "{}#{}: target contains the mask token",
                example.article_id, example.t
            )));
        }
        let seg = &example.input_segments;
        let parts = [&seg.s1, &seg.s_prev, &seg.masked_st, &seg.s_next];
        if parts.iter().any(|p| p.contains(config.separator.as_str())) {
            return Err(Error::Contract(format!(
                "{}#{}: a segment contains the separator",
                example.article_id, example.t
            )));
        }
        let glue = format!(" {} ", config.separator);
        Ok(TrainingRecord {
            input: parts.map(|p| p.as_str()).join(&glue),
            output: example.target.clone(),
        })
    }

    /// Split `input` back into its four segments.
    pub fn segments(&self, separator: &str) -> Result<GcfSegments> {
        let glue = format!(" {separator} ");
        let parts: Vec<&str> = self.input.split(glue.as_str()).collect();
        match parts.as_slice() {
            [s1, s_prev, masked_st, s_next] => Ok(GcfSegments {
                s1: s1.to_string(),
                s_prev: s_prev.to_string(),
                masked_st: masked_st.to_string(),
                s_next: s_next.to_string(),
            }),
            _ => Err(Error::Contract(format!(
                "training input has {} segments, expected 4",
                parts.len()
            ))),
        }
    }
}

/// Streaming writer for training lines. An optional metadata line
/// (`{"meta": ...}`) precedes the records.
pub struct TrainingWriter<W: Write> {
    out: W,
    config: GcfConfig,
    pub written: usize,
    pub rejected: usize,
}

impl<W: Write> TrainingWriter<W> {
    pub fn new(mut out: W, config: GcfConfig, meta: Option<serde_json::Value>) -> Result<Self> {
        if let Some(meta) = meta {
            serde_json::to_writer(&mut out, &serde_json::json!({ "meta": meta }))?;
            out.write_all(b"\n").map_err(|e| Error::io("<training>", e))?;
        }
        Ok(TrainingWriter {
            out,
            config,
            written: 0,
            rejected: 0,
        })
    }

    pub fn write(&mut self, example: &GcfExample) -> Result<()> {
        match TrainingRecord::from_example(example, &self.config) {
            Ok(record) => {
                serde_json::to_writer(&mut self.out, &record)?;
                self.out.write_all(b"\n").map_err(|e| Error::io("<training>", e))?;
                self.written += 1;
            }
            Err(e) => {
                log::warn!("skipping training record: {e}");
                self.rejected += 1;
            }
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush().map_err(|e| Error::io("<training>", e))?;
        Ok(self.out)
    }
}

/// Read training lines, skipping the metadata line if present.
pub fn parse_training(input: impl BufRead) -> Result<Vec<TrainingRecord>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line.map_err(|e| Error::io("<training>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line)?;
        if value.get("meta").is_some() && value.get("input").is_none() {
            continue;
        }
        out.push(serde_json::from_value(value)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub id: String,
    pub sentences: Vec<String>,
}

impl Article {
    /// Split raw text into sentences.
    pub fn from_text(id: impl Into<String>, text: &str) -> Self {
        Article {
            id: id.into(),
            sentences: sentence_split(text).into_iter().map(|(s, _)| s).collect(),
        }
    }
}

/// Articles from a JSONL file (`{id, sentences}` per line) or from a
/// directory of plain-text files, one article per file, in name order.
pub fn open_articles(path: impl AsRef<Path>) -> Result<Box<dyn Iterator<Item = Result<Article>>>> {
    let path = path.as_ref().to_path_buf();
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(&path)
            .map_err(|e| Error::io(&path, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        Ok(Box::new(files.into_iter().map(|file| {
            let text = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
            let id = file
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok(Article::from_text(id, &text))
        })))
    } else {
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        let lines = BufReader::new(file).lines().enumerate();
        Ok(Box::new(lines.filter_map(move |(i, line)| match line {
            Err(e) => Some(Err(Error::io(&path, e))),
            Ok(l) if l.trim().is_empty() => None,
            Ok(l) => Some(serde_json::from_str::<Article>(&l).map_err(|e| Error::Format {
                offset: e.column(),
                message: format!("line {}: {e}", i + 1),
            })),
        })))
    }
}

/// Process articles in bounded chunks, in parallel within a chunk, writing
/// examples in input order. Each article's rng is derived from `(seed, id)`,
/// so output does not depend on the thread count.
pub fn build_stream<W: Write>(
    articles: impl Iterator<Item = Result<Article>>,
    parser: &dyn ConstituencyParser,
    config: &GcfConfig,
    seed_value: u64,
    writer: &mut TrainingWriter<W>,
) -> Result<GcfStats> {
    const CHUNK: usize = 256;
    let mut stats = GcfStats::default();
    let mut chunk = Vec::with_capacity(CHUNK);
    let mut articles = articles.peekable();
    while articles.peek().is_some() {
        chunk.clear();
        for article in articles.by_ref().take(CHUNK) {
            chunk.push(article?);
        }
        let built: Vec<Result<(Vec<GcfExample>, GcfStats)>> = chunk
            .par_iter()
            .map(|article| {
                let mut rng = seed::rng(seed::derive(seed_value, &["gcf", &article.id]));
                build_examples(&article.id, &article.sentences, parser, config, &mut rng)
            })
            .collect();
        for result in built {
            let (examples, s) = result?;
            stats.add(&s);
            for example in &examples {
                writer.write(example)?;
            }
        }
    }
    stats.rejected = writer.rejected;
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::ChunkParser;

    fn sentences(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("The team {i} played in Denver.")).collect()
    }

    #[test]
    fn short_articles_yield_nothing() {
        let (ex, stats) = build_examples("a", &sentences(2), &ChunkParser, &GcfConfig::default(), &mut seed::rng(0)).unwrap();
        assert!(ex.is_empty());
        assert_eq!(stats.short_articles, 1);
    }

    #[test]
    fn interior_sentences_only() {
        let s = sentences(4);
        let (ex, _) = build_examples("a", &s, &ChunkParser, &GcfConfig::default(), &mut seed::rng(1)).unwrap();
        assert_eq!(ex.iter().map(|e| e.t).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(ex[0].input_segments.s1, s[0]);
        assert_eq!(ex[0].input_segments.s_prev, s[0]);
        assert_eq!(ex[1].input_segments.s_prev, s[1]);
        assert_eq!(ex[1].input_segments.s_next, s[3]);
        for e in &ex {
            assert_eq!(e.reconstruct("[MASK]").unwrap(), s[e.t - 1]);
        }
    }

    #[test]
    fn word_indices_cover_target() {
        let s = vec![
            "First.".to_string(),
            "It was played on February 7, 2016 today.".to_string(),
            "Last.".to_string(),
        ];
        let parser = crate::backend::TreebankParser::from_trees([
            "(S (NP (PRP It)) (VP (VBD was) (VBN played)) (PP (IN on) (NP (NNP February) (CD 7) (, ,) (CD 2016))) (NN today) (. .))",
        ])
        .unwrap();
        let (ex, _) = build_examples("a", &s, &parser, &GcfConfig::default(), &mut seed::rng(4)).unwrap();
        let e = &ex[0];
        let words: Vec<&str> = s[1].split_whitespace().collect();
        let joined = words[e.a - 1..e.b].join(" ");
        assert!(joined.contains(&e.target), "{joined:?} vs {:?}", e.target);
    }

    #[test]
    fn training_round_trip_and_rejection() {
        let s = sentences(4);
        let config = GcfConfig::default();
        let (mut ex, _) = build_examples("a", &s, &ChunkParser, &config, &mut seed::rng(2)).unwrap();
        let mut w = TrainingWriter::new(Vec::new(), config.clone(), Some(serde_json::json!({"seed": 2}))).unwrap();
        for e in &ex {
            w.write(e).unwrap();
        }
        ex[0].target = "bad [MASK]".into();
        w.write(&ex[0]).unwrap();
        assert_eq!((w.written, w.rejected), (2, 1));
        let bytes = w.finish().unwrap();
        let records = parse_training(&bytes[..]).unwrap();
        assert_eq!(records.len(), 2);
        let segs = records[1].segments("</s>").unwrap();
        assert_eq!(segs, ex[1].input_segments);
        assert_eq!(records[1].output, ex[1].target);
    }

    #[test]
    fn empty_training_file() {
        let w = TrainingWriter::new(Vec::new(), GcfConfig::default(), None).unwrap();
        assert!(w.finish().unwrap().is_empty());
    }

    #[test]
    fn stream_is_thread_count_independent() {
        let articles: Vec<Article> = (0..20)
            .map(|i| Article {
                id: format!("art{i}"),
                sentences: sentences(3 + i % 4),
            })
            .collect();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let mut w = TrainingWriter::new(Vec::new(), GcfConfig::default(), None).unwrap();
                let stats = build_stream(articles.clone().into_iter().map(Ok), &ChunkParser, &GcfConfig::default(), 11, &mut w).unwrap();
                (w.finish().unwrap(), stats)
            })
        };
        let (one, stats) = run(1);
        assert_eq!(run(4).0, one);
        assert_eq!(stats.articles, 20);
        assert_eq!(stats.examples, (0..20).map(|i| 1 + i % 4).sum::<usize>());
    }
}
