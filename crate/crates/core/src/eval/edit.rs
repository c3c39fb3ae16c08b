//! Character-level edit distance and the corpus edit percentage.

use crate::error::{Error, Result};

/// Levenshtein distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let prefix = a.iter().zip(&b).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let suffix = a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[..a.len() - suffix], &b[..b.len() - suffix]);
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return long.len();
    }
    let mut prev: Vec<usize> = (0..=short.len()).collect();
    let mut cur = vec![0; short.len() + 1];
    for (i, lc) in long.iter().enumerate() {
        cur[0] = i + 1;
        for (j, sc) in short.iter().enumerate() {
            let substitute = prev[j] + usize::from(lc != sc);
            cur[j + 1] = substitute.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

/// Mean over pairs of `100 * levenshtein(fake, original) / chars(original)`.
/// An empty pair list yields 0.
pub fn edit_metric<S: AsRef<str>, T: AsRef<str>>(pairs: &[(S, T)]) -> Result<f64> {
    if pairs.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (original, fake) in pairs {
        let original = original.as_ref();
        let len = original.chars().count();
        if len == 0 {
            return Err(Error::Contract("edit metric needs non-empty originals".into()));
        }
        total += 100.0 * levenshtein(fake.as_ref(), original) as f64 / len as f64;
    }
    Ok(total / pairs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_distances() {
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("flaw", "lawn"), 2);
        assert_eq!(levenshtein("héllo", "hello"), 1);
    }

    #[test]
    fn metric_examples() {
        assert_eq!(edit_metric(&[("abcd", "abed")]).unwrap(), 25.0);
        assert_eq!(edit_metric(&[("same", "same")]).unwrap(), 0.0);
        assert_eq!(edit_metric(&[("ab", "ab"), ("abcd", "abed")]).unwrap(), 12.5);
        assert!(edit_metric(&[("", "x")]).is_err());
    }
}
