use std::collections::HashSet;
use std::path::Path;

use contraforge::squad::{paragraph_id, parse_squad};

use crate::error::{CliError, CliResult};

/// Paragraph texts from SQuAD JSON, JSONL records with a `text` or `context`
/// field, or plain text with one paragraph per line. Repeats are dropped.
pub fn load_paragraphs(path: &Path) -> CliResult<Vec<String>> {
    let bytes = std::fs::read(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let texts: Vec<String> = match serde_json::from_slice::<serde_json::Value>(&bytes) {
        Ok(v) if v.get("data").is_some() => parse_squad(&bytes)?.into_iter().map(|(p, _)| p.text).collect(),
        _ => {
            let text = String::from_utf8(bytes)
                .map_err(|e| CliError::validation(format!("{}: not UTF-8: {e}", path.display())))?;
            let mut out = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                if line.starts_with('{') {
                    let v: serde_json::Value = serde_json::from_str(line).map_err(|e| {
                        CliError::validation(format!("{} line {}: {e}", path.display(), i + 1))
                    })?;
                    if v.get("format").is_some() || v.get("meta").is_some() {
                        continue;
                    }
                    let field = v.get("text").or_else(|| v.get("context")).and_then(|t| t.as_str());
                    match field {
                        Some(t) => out.push(t.to_string()),
                        None => {
                            return Err(CliError::validation(format!(
                                "{} line {}: expected a `text` or `context` field",
                                path.display(),
                                i + 1
                            )))
                        }
                    }
                } else {
                    out.push(line.to_string());
                }
            }
            out
        }
    };
    let mut seen = HashSet::new();
    Ok(texts
        .into_iter()
        .filter(|t| !t.trim().is_empty() && seen.insert(paragraph_id(t)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_formats() {
        let dir = tempfile::tempdir().unwrap();
        let squad = dir.path().join("s.json");
        std::fs::write(
            &squad,
            r#"{"data": [{"title": "t", "paragraphs": [{"context": "One two.", "qas": []}, {"context": "One two.", "qas": []}]}]}"#,
        )
        .unwrap();
        assert_eq!(load_paragraphs(&squad).unwrap(), vec!["One two."]);

        let jsonl = dir.path().join("p.jsonl");
        std::fs::write(&jsonl, "{\"text\": \"A b.\"}\n\n{\"context\": \"C d.\"}\n").unwrap();
        assert_eq!(load_paragraphs(&jsonl).unwrap(), vec!["A b.", "C d."]);

        let txt = dir.path().join("p.txt");
        std::fs::write(&txt, "First one.\nSecond one.\n").unwrap();
        assert_eq!(load_paragraphs(&txt).unwrap().len(), 2);

        let bad = dir.path().join("b.jsonl");
        std::fs::write(&bad, "{\"title\": \"x\"}\n").unwrap();
        assert_eq!(load_paragraphs(&bad).unwrap_err().code, crate::error::VALIDATION);
    }
}
