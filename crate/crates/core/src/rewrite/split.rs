//! Rule-based sentence splitting with an abbreviation guard.

const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt", "ft", "gen", "col", "lt", "sgt",
    "capt", "gov", "sen", "rep", "rev", "hon", "inc", "ltd", "co", "corp", "vs", "etc", "no",
    "nos", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec",
    "fig", "al", "approx", "est", "dept", "univ", "ca", "cf",
];

fn words_after(chars: &[char], from: usize) -> usize {
    chars[from..]
        .split(|c| c.is_whitespace())
        .filter(|w| !w.is_empty())
        .count()
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '}' | '\u{201d}' | '\u{2019}')
}

fn opens_sentence(c: char) -> bool {
    c.is_uppercase()
        || c.is_ascii_digit()
        || matches!(c, '"' | '\'' | '(' | '[' | '\u{201c}' | '\u{2018}')
}

/// True when the word ending just before `dot` is an abbreviation or initial.
///
/// A lone capital counts as an initial only when the next word is not the
/// last one, so "J. R. R. Tolkien wrote it." stays whole but "A. B." splits.
fn is_abbreviation(chars: &[char], dot: usize) -> bool {
    let mut start = dot;
    while start > 0 && !chars[start - 1].is_whitespace() {
        start -= 1;
    }
    let word: String = chars[start..dot]
        .iter()
        .skip_while(|c| !c.is_alphanumeric())
        .collect();
    if word.is_empty() {
        return false;
    }
    if word.contains('.') {
        // U.S, e.g, i.e
        return true;
    }
    let mut letters = word.chars();
    if let (Some(first), None) = (letters.next(), letters.next()) {
        if first.is_uppercase() {
            return words_after(chars, dot + 1) > 1;
        }
    }
    ABBREVIATIONS.contains(&word.to_lowercase().as_str())
}

/// Split a paragraph into trimmed sentences with their character spans.
///
/// Spans are ordered and non-overlapping; the text between them is whitespace.
pub fn sentence_split(paragraph: &str) -> Vec<(String, (usize, usize))> {
    let chars: Vec<char> = paragraph.chars().collect();
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    let push = |out: &mut Vec<(String, (usize, usize))>, s: usize, e: usize| {
        let mut s = s;
        let mut e = e;
        while s < e && chars[s].is_whitespace() {
            s += 1;
        }
        while e > s && chars[e - 1].is_whitespace() {
            e -= 1;
        }
        if s < e {
            out.push((chars[s..e].iter().collect(), (s, e)));
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if matches!(c, '.' | '!' | '?') {
            let mut end = i + 1;
            while end < chars.len() && (matches!(chars[end], '.' | '!' | '?') || is_closer(chars[end])) {
                end += 1;
            }
            let boundary = if end == chars.len() {
                true
            } else if chars[end].is_whitespace() {
                let next = chars[end..].iter().find(|c| !c.is_whitespace());
                let guarded = c == '.' && end == i + 1 && is_abbreviation(&chars, i);
                matches!(next, Some(&n) if opens_sentence(n)) && !guarded
            } else {
                false
            };
            if boundary {
                push(&mut out, start, end);
                start = end;
            }
            i = end;
        } else {
            i += 1;
        }
    }
    push(&mut out, start, chars.len());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(p: &str) -> Vec<String> {
        sentence_split(p).into_iter().map(|(s, _)| s).collect()
    }

    #[test]
    fn basic_cases() {
        assert_eq!(texts("A. B."), vec!["A.", "B."]);
        assert_eq!(texts("Dr. Smith left. He returned."), vec!["Dr. Smith left.", "He returned."]);
        assert!(texts("").is_empty());
        assert!(texts("   ").is_empty());
        assert_eq!(texts("no boundary here"), vec!["no boundary here"]);
    }

    #[test]
    fn quotes_and_numbers() {
        assert_eq!(
            texts("He said \"stop.\" Then 50 people left! Was it 3.5 km? Yes."),
            vec!["He said \"stop.\"", "Then 50 people left!", "Was it 3.5 km?", "Yes."]
        );
        assert_eq!(
            texts("The U.S. Army won. J. R. R. Tolkien wrote it."),
            vec!["The U.S. Army won.", "J. R. R. Tolkien wrote it."]
        );
        assert_eq!(texts("It rose. then fell."), vec!["It rose. then fell."]);
    }

    #[test]
    fn spans_tile_the_paragraph() {
        let p = "  First one.  Second one?\nThird ";
        let parts = sentence_split(p);
        let chars: Vec<char> = p.chars().collect();
        let mut cursor = 0;
        for (s, (a, b)) in &parts {
            assert!(chars[cursor..*a].iter().all(|c| c.is_whitespace()));
            assert_eq!(&chars[*a..*b].iter().collect::<String>(), s);
            cursor = *b;
        }
        assert!(chars[cursor..].iter().all(|c| c.is_whitespace()));
        assert_eq!(parts.len(), 3);
    }
}
