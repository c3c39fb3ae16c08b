//! Token diff between an original passage and an annotator's rewrite.
//!
//! Tokens are whitespace-separated words with leading and trailing
//! punctuation split into single-character tokens. A Myers diff gives the
//! matching tokens; runs of changes separated by very short equal stretches are
//! then merged, so a rewritten clause that happens to reuse a word counts as one
//! edit rather than several.

use serde::{Deserialize, Serialize};
use similar::{capture_diff_slices, Algorithm, DiffOp};

use crate::error::{Error, Result};
use crate::rewrite::sentence_split;
use crate::text::{char_len, char_slice, whitespace_tokens};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub span: (usize, usize),
}

/// Split `s` into diff tokens with character spans.
pub fn tokenize(s: &str) -> Vec<Token> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    for (start, end) in whitespace_tokens(s) {
        let word = &chars[start..end];
        let lead = word.iter().take_while(|c| !c.is_alphanumeric()).count();
        if lead == word.len() {
            for i in start..end {
                out.push(Token {
                    text: chars[i].to_string(),
                    span: (i, i + 1),
                });
            }
            continue;
        }
        let trail = word.iter().rev().take_while(|c| !c.is_alphanumeric()).count();
        for i in start..start + lead {
            out.push(Token {
                text: chars[i].to_string(),
                span: (i, i + 1),
            });
        }
        out.push(Token {
            text: chars[start + lead..end - trail].iter().collect(),
            span: (start + lead, end - trail),
        });
        for i in end - trail..end {
            out.push(Token {
                text: chars[i].to_string(),
                span: (i, i + 1),
            });
        }
    }
    out
}

/// A maximal changed region. Spans are character offsets into the original
/// and modified texts; `orig_tokens`/`new_tokens` are the diff tokens inside.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hunk {
    pub orig_span: (usize, usize),
    pub new_span: (usize, usize),
    pub orig_text: String,
    pub new_text: String,
    pub orig_tokens: Vec<String>,
    pub new_tokens: Vec<String>,
    /// Index range of `orig_tokens` within the original's token list.
    pub orig_token_range: (usize, usize),
    /// Only spacing changed; not counted as an edit.
    pub whitespace_only: bool,
}

#[derive(Debug, Clone, Copy)]
enum Item {
    Equal { old: usize, new: usize },
    Change { old: (usize, usize), new: (usize, usize) },
}

fn change_weight(old: (usize, usize), new: (usize, usize)) -> usize {
    (old.1 - old.0).max(new.1 - new.0)
}

/// For each sentence of `text`, the index range of its diff tokens.
pub(crate) fn sentence_token_ranges(text: &str, tokens: &[Token]) -> Vec<(usize, usize)> {
    sentence_split(text)
        .into_iter()
        .map(|(_, (start, end))| {
            let first = tokens.iter().position(|t| t.span.0 >= start).unwrap_or(tokens.len());
            let last = tokens.iter().rposition(|t| t.span.1 <= end).map_or(first, |i| i + 1);
            (first, last.max(first))
        })
        .collect()
}

/// Collapse equal stretches shorter than the changes on both sides. Changes
/// in different sentences of the original are never joined.
fn merge_short_equalities(items: Vec<Item>, sentence_starts: &[usize]) -> Vec<Item> {
    // Group into runs: Change, or a stretch of consecutive Equal tokens.
    #[derive(Clone, Copy)]
    enum Run {
        Equal { old: usize, new: usize, len: usize },
        Change { old: (usize, usize), new: (usize, usize) },
    }
    let mut runs: Vec<Run> = Vec::new();
    for item in items {
        match (item, runs.last_mut()) {
            (Item::Equal { .. }, Some(Run::Equal { len, .. })) => *len += 1,
            (Item::Equal { old, new }, _) => runs.push(Run::Equal { old, new, len: 1 }),
            (Item::Change { old, new }, Some(Run::Change { old: o, new: n })) => {
                o.1 = old.1;
                n.1 = new.1;
            }
            (Item::Change { old, new }, _) => runs.push(Run::Change { old, new }),
        }
    }
    loop {
        let mut merged = false;
        let mut i = 1;
        while i + 1 < runs.len() {
            if let (Run::Change { old: o1, new: n1 }, Run::Equal { old: e0, len, .. }, Run::Change { old: o2, new: n2 }) =
                (runs[i - 1], runs[i], runs[i + 1])
            {
                let crosses = sentence_starts.iter().any(|&s| s > 0 && e0 <= s && s <= e0 + len);
                if !crosses && len < change_weight(o1, n1) && len < change_weight(o2, n2) {
                    runs.splice(
                        i - 1..=i + 1,
                        [Run::Change {
                            old: (o1.0, o2.1),
                            new: (n1.0, n2.1),
                        }],
                    );
                    merged = true;
                    continue;
                }
            }
            i += 1;
        }
        if !merged {
            break;
        }
    }
    let mut out = Vec::new();
    for run in runs {
        match run {
            Run::Equal { old, new, len } => {
                out.extend((0..len).map(|k| Item::Equal {
                    old: old + k,
                    new: new + k,
                }));
            }
            Run::Change { old, new } => out.push(Item::Change { old, new }),
        }
    }
    out
}

fn diff_items(a: &[Token], b: &[Token], sentence_starts: &[usize]) -> Vec<Item> {
    let a_text: Vec<&str> = a.iter().map(|t| t.text.as_str()).collect();
    let b_text: Vec<&str> = b.iter().map(|t| t.text.as_str()).collect();
    let mut items = Vec::new();
    for op in capture_diff_slices(Algorithm::Myers, &a_text, &b_text) {
        match op {
            DiffOp::Equal { old_index, new_index, len } => {
                items.extend((0..len).map(|k| Item::Equal {
                    old: old_index + k,
                    new: new_index + k,
                }));
            }
            DiffOp::Delete { old_index, old_len, new_index } => items.push(Item::Change {
                old: (old_index, old_index + old_len),
                new: (new_index, new_index),
            }),
            DiffOp::Insert { old_index, new_index, new_len } => items.push(Item::Change {
                old: (old_index, old_index),
                new: (new_index, new_index + new_len),
            }),
            DiffOp::Replace { old_index, old_len, new_index, new_len } => items.push(Item::Change {
                old: (old_index, old_index + old_len),
                new: (new_index, new_index + new_len),
            }),
        }
    }
    // Adjacent change ops (delete followed by insert) are one region.
    let mut coalesced: Vec<Item> = Vec::with_capacity(items.len());
    for item in items {
        if let (Item::Change { old, new }, Some(Item::Change { old: o, new: n })) = (item, coalesced.last_mut()) {
            o.1 = old.1;
            n.1 = new.1;
            continue;
        }
        coalesced.push(item);
    }
    merge_short_equalities(coalesced, sentence_starts)
}

/// Characters between anchor tokens: end of `before` (or 0) to start of
/// `after` (or the end of the text).
fn region(tokens: &[Token], before: Option<usize>, after: Option<usize>, len: usize) -> (usize, usize) {
    let start = before.map_or(0, |i| tokens[i].span.1);
    let end = after.map_or(len, |i| tokens[i].span.0);
    (start, end)
}

/// Changed regions between `original` and `modified`, in order.
///
/// Replacing each hunk's `orig_span` with its `new_text` turns the original
/// into the modified text exactly (see [`patch`]).
pub fn diff_hunks(original: &str, modified: &str) -> Vec<Hunk> {
    let a = tokenize(original);
    let b = tokenize(modified);
    let (a_len, b_len) = (char_len(original), char_len(modified));
    let a_chars: Vec<char> = original.chars().collect();
    let b_chars: Vec<char> = modified.chars().collect();

    // Anchors are the surviving equal tokens. Between consecutive anchors
    // there is either one change or only inter-token whitespace.
    let starts: Vec<usize> = sentence_token_ranges(original, &a).iter().map(|r| r.0).collect();
    let items = diff_items(&a, &b, &starts);
    let mut hunks = Vec::new();
    let mut prev: (Option<usize>, Option<usize>) = (None, None);
    let mut pending: Option<((usize, usize), (usize, usize))> = None;
    let mut emit = |prev: (Option<usize>, Option<usize>),
                    next: (Option<usize>, Option<usize>),
                    change: Option<((usize, usize), (usize, usize))>| {
        let (mut o0, mut o1) = region(&a, prev.0, next.0, a_len);
        let (mut n0, mut n1) = region(&b, prev.1, next.1, b_len);
        if change.is_none() && a_chars[o0..o1] == b_chars[n0..n1] {
            return;
        }
        // Trim shared surrounding whitespace so spans are tight.
        while o0 < o1 && n0 < n1 && a_chars[o0] == b_chars[n0] && a_chars[o0].is_whitespace() {
            o0 += 1;
            n0 += 1;
        }
        while o1 > o0 && n1 > n0 && a_chars[o1 - 1] == b_chars[n1 - 1] && a_chars[o1 - 1].is_whitespace() {
            o1 -= 1;
            n1 -= 1;
        }
        let (old, new) = change.unwrap_or_else(|| {
            let o = prev.0.map_or(0, |i| i + 1);
            let n = prev.1.map_or(0, |i| i + 1);
            ((o, o), (n, n))
        });
        hunks.push(Hunk {
            orig_span: (o0, o1),
            new_span: (n0, n1),
            orig_text: a_chars[o0..o1].iter().collect(),
            new_text: b_chars[n0..n1].iter().collect(),
            orig_tokens: a[old.0..old.1].iter().map(|t| t.text.clone()).collect(),
            new_tokens: b[new.0..new.1].iter().map(|t| t.text.clone()).collect(),
            orig_token_range: old,
            whitespace_only: change.is_none(),
        });
    };
    for item in items {
        match item {
            Item::Change { old, new } => pending = Some((old, new)),
            Item::Equal { old, new } => {
                let next = (Some(old), Some(new));
                emit(prev, next, pending.take());
                prev = next;
            }
        }
    }
    emit(prev, (None, None), pending.take());
    hunks
}

/// Apply hunks to `original`.
pub fn patch(original: &str, hunks: &[Hunk]) -> Result<String> {
    let mut out = String::with_capacity(original.len());
    let mut cursor = 0;
    for h in hunks {
        let (start, end) = h.orig_span;
        if start < cursor {
            return Err(Error::Contract("hunks overlap or are out of order".into()));
        }
        let found = char_slice(original, start, end)?;
        if found != h.orig_text {
            return Err(Error::Contract(format!(
                "hunk expects {:?} at {:?}, found {found:?}",
                h.orig_text, h.orig_span
            )));
        }
        out.push_str(char_slice(original, cursor, start)?);
        out.push_str(&h.new_text);
        cursor = end;
    }
    out.push_str(char_slice(original, cursor, char_len(original))?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edits(h: &[Hunk]) -> usize {
        h.iter().filter(|h| !h.whitespace_only).count()
    }

    #[test]
    fn tokenization() {
        let t: Vec<String> = tokenize("\"Hi,\" said U.S. (x) --").into_iter().map(|t| t.text).collect();
        assert_eq!(t, vec!["\"", "Hi", ",", "\"", "said", "U.S", ".", "(", "x", ")", "-", "-"]);
    }

    #[test]
    fn identical_is_empty() {
        assert!(diff_hunks("a b c", "a b c").is_empty());
        assert!(diff_hunks("", "").is_empty());
    }

    #[test]
    fn single_replacement() {
        let h = diff_hunks("the game was won", "the match was won");
        assert_eq!(h.len(), 1);
        assert_eq!((h[0].orig_tokens.len(), h[0].new_tokens.len()), (1, 1));
        assert_eq!((h[0].orig_text.as_str(), h[0].new_text.as_str()), ("game", "match"));
        assert_eq!(h[0].orig_span, (4, 8));
    }

    #[test]
    fn two_separate_hunks() {
        let h = diff_hunks("a b c d", "a X c Y");
        assert_eq!(edits(&h), 2);
        assert_eq!(patch("a b c d", &h).unwrap(), "a X c Y");
    }

    #[test]
    fn short_equality_between_longer_changes_merges() {
        let h = diff_hunks("one two x three four", "five six x seven eight");
        assert_eq!(edits(&h), 1);
    }

    #[test]
    fn merging_stops_at_sentence_boundaries() {
        let h = diff_hunks("We met in Santa Clara. The Broncos beat them.", "We met in Atlanta. Nobody beat anyone there.");
        assert_eq!(edits(&h), 2);
    }

    #[test]
    fn whitespace_changes_are_listed_not_counted() {
        let h = diff_hunks("a b  c", "a b c");
        assert_eq!(h.len(), 1);
        assert!(h[0].whitespace_only);
        assert_eq!(patch("a b  c", &h).unwrap(), "a b c");
        let h = diff_hunks(" a", "a ");
        assert_eq!(patch(" a", &h).unwrap(), "a ");
        assert_eq!(edits(&h), 0);
    }

    #[test]
    fn insertions_and_deletions() {
        for (a, b) in [
            ("Tesla worked every day.", "Tesla worked every day but Sunday."),
            ("x y z", ""),
            ("", "x y z"),
            ("alpha beta", "beta"),
        ] {
            let h = diff_hunks(a, b);
            assert_eq!(patch(a, &h).unwrap(), b, "{a:?} -> {b:?}");
            assert_eq!(edits(&h), 1);
        }
    }
}
