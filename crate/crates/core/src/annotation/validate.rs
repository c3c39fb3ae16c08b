use serde::{Deserialize, Serialize};

use super::diff::{diff_hunks, sentence_token_ranges, tokenize, Hunk};
use crate::rewrite::sentence_split;

pub const REVIEW_WARNING: &str = "no contradiction check performed — requires expert review";

/// Edits required for a passage: one more than its sentence count.
pub fn m_required(original: &str) -> usize {
    sentence_split(original).len() + 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationResult {
    pub edit_count: usize,
    pub m_required: usize,
    pub hunks: Vec<Hunk>,
    pub has_long_edit: bool,
    pub valid: bool,
    /// Failed gates, in a fixed order.
    pub reasons: Vec<String>,
    pub warnings: Vec<String>,
}

/// True when some hunk replaces or deletes at least half of the tokens of
/// one original sentence.
fn has_long_edit(original: &str, hunks: &[Hunk]) -> bool {
    let sentences = sentence_token_ranges(original, &tokenize(original));
    hunks.iter().filter(|h| !h.whitespace_only).any(|h| {
        let (h0, h1) = h.orig_token_range;
        sentences.iter().any(|&(s0, s1)| {
            let size = s1 - s0;
            let covered = h1.min(s1).saturating_sub(h0.max(s0));
            size > 0 && 2 * covered >= size
        })
    })
}

/// Check a rewrite against the mechanical guidelines: it differs from the
/// original, has at least `m_required` separate edits, and at least one edit
/// rewrites half of a sentence or more.
pub fn validate(original: &str, modified: &str) -> ValidationResult {
    let hunks = diff_hunks(original, modified);
    let edit_count = hunks.iter().filter(|h| !h.whitespace_only).count();
    let m = m_required(original);
    let long = has_long_edit(original, &hunks);
    let mut reasons = Vec::new();
    if modified == original {
        reasons.push("text is unchanged".to_string());
    }
    if edit_count < m {
        reasons.push(format!("{edit_count} of {m} required edits"));
    }
    if !long {
        reasons.push("no edit rewrites at least half of a sentence".to_string());
    }
    ValidationResult {
        edit_count,
        m_required: m,
        hunks,
        has_long_edit: long,
        valid: reasons.is_empty(),
        reasons,
        warnings: vec![REVIEW_WARNING.to_string()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = "The game was played in Santa Clara. The Broncos beat the Panthers.";

    #[test]
    fn unchanged_is_invalid() {
        let r = validate(TWO, TWO);
        assert!(!r.valid);
        assert_eq!(r.edit_count, 0);
        assert_eq!(r.m_required, 3);
        assert!(r.warnings.iter().any(|w| w == REVIEW_WARNING));
    }

    #[test]
    fn three_hunks_with_full_sentence_rewrite() {
        let modified = "The match was played in Atlanta. Nobody watched the final whistle that evening.";
        let r = validate(TWO, modified);
        assert_eq!(r.edit_count, 3, "{:#?}", r.hunks);
        assert!(r.has_long_edit);
        assert!(r.valid, "{:?}", r.reasons);
    }

    #[test]
    fn boycott_rewrite_is_long() {
        let original = "The study suggests that boycotts are \"blunt instruments with long-term consequences, that can actually harm the children involved.\"";
        let modified = "The study did not find any major negative repercussions from boycotts, however, and found that boycotting is the best solution.";
        let r = validate(original, modified);
        assert!(r.has_long_edit, "{:#?}", r.hunks);
    }

    #[test]
    fn sentence_ranges() {
        let r = |s: &str| sentence_token_ranges(s, &tokenize(s));
        assert_eq!(r("A b. C d e."), vec![(0, 3), (3, 7)]);
        assert!(r("").is_empty());
    }
}
