//! Answer normalization, EM/F1, score fusion and answer aggregation.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::backend::ScoredAnswer;

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Lowercase, drop ASCII punctuation, drop the articles a/an/the as whole
/// words, collapse whitespace.
pub fn normalize_answer(s: &str) -> String {
    let lowered: String = s
        .to_lowercase()
        .chars()
        .filter(|c| !c.is_ascii_punctuation())
        .collect();
    // Articles are removed at word boundaries, where a word is a maximal run
    // of alphanumerics and underscores.
    let mut without_articles = String::with_capacity(lowered.len());
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut String| {
        if matches!(word.as_str(), "a" | "an" | "the") {
            out.push(' ');
        } else {
            out.push_str(word);
        }
        word.clear();
    };
    for c in lowered.chars() {
        if is_word_char(c) {
            word.push(c);
        } else {
            flush(&mut word, &mut without_articles);
            without_articles.push(c);
        }
    }
    flush(&mut word, &mut without_articles);
    without_articles.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// 1.0 when the normalized prediction equals some normalized gold.
pub fn em(prediction: &str, golds: &[String]) -> f64 {
    let p = normalize_answer(prediction);
    if golds.iter().any(|g| normalize_answer(g) == p) {
        1.0
    } else {
        0.0
    }
}

fn f1_single(prediction: &str, gold: &str) -> f64 {
    let p = normalize_answer(prediction);
    let g = normalize_answer(gold);
    let p_tokens: Vec<&str> = p.split_whitespace().collect();
    let g_tokens: Vec<&str> = g.split_whitespace().collect();
    if p_tokens.is_empty() || g_tokens.is_empty() {
        return if p_tokens.is_empty() && g_tokens.is_empty() { 1.0 } else { 0.0 };
    }
    let mut gold_counts: HashMap<&str, usize> = HashMap::new();
    for t in &g_tokens {
        *gold_counts.entry(t).or_default() += 1;
    }
    let mut same = 0usize;
    for t in &p_tokens {
        if let Some(n) = gold_counts.get_mut(t) {
            if *n > 0 {
                *n -= 1;
                same += 1;
            }
        }
    }
    if same == 0 {
        return 0.0;
    }
    let precision = same as f64 / p_tokens.len() as f64;
    let recall = same as f64 / g_tokens.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Token-level F1, maximised over golds.
pub fn f1(prediction: &str, golds: &[String]) -> f64 {
    golds
        .iter()
        .map(|g| f1_single(prediction, g))
        .fold(0.0, f64::max)
}

/// `lambda * span + (1 - lambda) * trust`.
pub fn fuse(span_score: f64, trust: f64, lambda: f64) -> f64 {
    lambda * span_score + (1.0 - lambda) * trust
}

fn rank(a: &ScoredAnswer, b: &ScoredAnswer, use_fusion: bool) -> Ordering {
    let key = |x: &ScoredAnswer| if use_fusion { x.fused_score } else { x.span_score };
    // Higher score first, then lower context index, then earlier span.
    key(b)
        .total_cmp(&key(a))
        .then(a.context_index.cmp(&b.context_index))
        .then(a.char_span.0.cmp(&b.char_span.0))
}

/// Best candidate by span score, or by fused score when `use_fusion`.
pub fn aggregate_answer(candidates: &[ScoredAnswer], use_fusion: bool) -> Option<&ScoredAnswer> {
    candidates.iter().min_by(|a, b| rank(a, b, use_fusion))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golds(g: &[&str]) -> Vec<String> {
        g.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn normalization_rules() {
        assert_eq!(normalize_answer("The Denver Broncos!"), "denver broncos");
        assert_eq!(normalize_answer(""), "");
        assert_eq!(normalize_answer("a an the"), "");
        assert_eq!(normalize_answer("theatre"), "theatre");
        assert_eq!(normalize_answer("the\u{2014}end"), "\u{2014}end");
    }

    #[test]
    fn partial_overlap() {
        assert!((f1("February 7, 2016", &golds(&["February 7"])) - 0.8).abs() < 1e-12);
        assert_eq!(em("Atlanta", &golds(&["Santa Clara"])), 0.0);
        assert_eq!(f1("Atlanta", &golds(&["Santa Clara"])), 0.0);
        assert_eq!(f1("the", &golds(&["a"])), 1.0);
    }

    #[test]
    fn fused_real_wins() {
        let mut fake = ScoredAnswer::new("x".into(), (0, 1), 0.9);
        fake.trust_score = 0.0;
        fake.fused_score = fuse(0.9, 0.0, 0.5);
        let mut real = ScoredAnswer::new("y".into(), (0, 1), 0.8);
        real.context_index = 1;
        real.fused_score = fuse(0.8, 1.0, 0.5);
        assert_eq!(fake.fused_score, 0.45);
        assert_eq!(real.fused_score, 0.9);
        let c = [fake, real];
        assert_eq!(aggregate_answer(&c, true).unwrap().context_index, 1);
        assert_eq!(aggregate_answer(&c, false).unwrap().context_index, 0);
    }

    #[test]
    fn ties_prefer_lower_index_then_start() {
        let mut a = ScoredAnswer::new("a".into(), (5, 6), 0.5);
        a.context_index = 2;
        let mut b = ScoredAnswer::new("b".into(), (9, 10), 0.5);
        b.context_index = 1;
        let mut c = ScoredAnswer::new("c".into(), (3, 4), 0.5);
        c.context_index = 1;
        let all = [a, b, c];
        assert_eq!(aggregate_answer(&all, false).unwrap().text, "c");
        assert!(aggregate_answer(&[], false).is_none());
    }
}
