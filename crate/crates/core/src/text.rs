//! Character-offset helpers. All spans in this crate count Unicode scalar
//! values, not bytes, so they survive a round trip through any JSON consumer.

use crate::error::{Error, Result};

/// Number of characters in `s`.
pub fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Byte index of character offset `char_idx`; `s.len()` when at the end.
pub fn byte_offset(s: &str, char_idx: usize) -> Option<usize> {
    if char_idx == 0 {
        return Some(0);
    }
    let mut count = 0;
    for (byte, _) in s.char_indices() {
        if count == char_idx {
            return Some(byte);
        }
        count += 1;
    }
    (count == char_idx).then_some(s.len())
}

/// Substring by character offsets `[start, end)`.
pub fn char_slice(s: &str, start: usize, end: usize) -> Result<&str> {
    let span_err = || Error::Span {
        start,
        end,
        len: char_len(s),
    };
    if start > end {
        return Err(span_err());
    }
    let b0 = byte_offset(s, start).ok_or_else(span_err)?;
    let b1 = byte_offset(s, end).ok_or_else(span_err)?;
    Ok(&s[b0..b1])
}

/// Lowercase and collapse runs of whitespace; used for echo detection.
pub fn fold(s: &str) -> String {
    s.split_whitespace()
        .map(|w| w.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Whitespace-collapsed form, case preserved.
pub fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Whitespace tokens with their character spans.
pub fn whitespace_tokens(s: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    let mut idx = 0;
    for c in s.chars() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(idx),
            (true, Some(st)) => {
                out.push((st, idx));
                start = None;
            }
            _ => {}
        }
        idx += 1;
    }
    if let Some(st) = start {
        out.push((st, idx));
    }
    out
}
