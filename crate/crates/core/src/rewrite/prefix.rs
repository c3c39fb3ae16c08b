use serde::{Deserialize, Serialize};

use crate::backend::Completer;
use crate::error::{Error, Result};
use crate::text::{char_slice, fold, whitespace_tokens};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixRewrite {
    pub text: String,
    pub prefix_tokens: usize,
    pub truncated: bool,
    /// The output equals the original (folded); the fake contradicts nothing.
    pub zero_edit: bool,
}

/// Keep the first `ceil(ratio * tokens)` whitespace tokens and append the
/// completer's continuation, capped at 1.5x the original token count.
pub fn prefix_completion_rewrite(
    paragraph: &str,
    completer: &dyn Completer,
    prefix_ratio: f64,
) -> Result<PrefixRewrite> {
    if !(prefix_ratio > 0.0 && prefix_ratio < 1.0) {
        return Err(Error::Config(format!(
            "prefix ratio {prefix_ratio} must be in (0, 1)"
        )));
    }
    let tokens = whitespace_tokens(paragraph);
    if tokens.is_empty() {
        return Err(Error::Contract("cannot complete an empty paragraph".into()));
    }
    // Guard against products like 0.7 * 10 = 7.000000000000001.
    let want = (prefix_ratio * tokens.len() as f64 - 1e-9).ceil() as usize;
    let prefix_tokens = want.clamp(1, tokens.len());
    let prefix = char_slice(paragraph, 0, tokens[prefix_tokens - 1].1)?;

    let mut text = format!("{prefix}{}", completer.complete(prefix)?);
    let limit = tokens.len() * 3 / 2;
    let out_tokens = whitespace_tokens(&text);
    let truncated = out_tokens.len() > limit;
    if truncated {
        text = char_slice(&text, 0, out_tokens[limit - 1].1)?.to_string();
    }
    let zero_edit = fold(&text) == fold(paragraph);
    if zero_edit {
        log::warn!("prefix completion reproduced the original paragraph");
    }
    Ok(PrefixRewrite {
        text,
        prefix_tokens,
        truncated,
        zero_edit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fixed(&'static str);

    impl Completer for Fixed {
        fn complete(&self, _prompt: &str) -> Result<String> {
            Ok(self.0.to_string())
        }
    }

    /// Returns the original text after the prompt.
    struct Echo(&'static str);

    impl Completer for Echo {
        fn complete(&self, prompt: &str) -> Result<String> {
            Ok(self.0[prompt.len()..].to_string())
        }
    }

    const TEN: &str = "one two three four five six seven eight nine ten";

    #[test]
    fn ceiling_prefix() {
        let r = prefix_completion_rewrite(TEN, &Fixed(""), 0.2).unwrap();
        assert_eq!(r.text, "one two");
        assert_eq!(r.prefix_tokens, 2);
        let r = prefix_completion_rewrite(TEN, &Fixed(""), 0.7).unwrap();
        assert_eq!(r.prefix_tokens, 7);
        let r = prefix_completion_rewrite(TEN, &Fixed(""), 0.21).unwrap();
        assert_eq!(r.prefix_tokens, 3);
    }

    #[test]
    fn echo_is_flagged() {
        let r = prefix_completion_rewrite(TEN, &Echo(TEN), 0.2).unwrap();
        assert_eq!(r.text, TEN);
        assert!(r.zero_edit);
    }

    #[test]
    fn long_completion_is_truncated() {
        let r = prefix_completion_rewrite(TEN, &Fixed(" a b c d e f g h i j k l m n o p q r"), 0.2).unwrap();
        assert!(r.truncated);
        assert_eq!(whitespace_tokens(&r.text).len(), 15);
        assert!(!r.zero_edit);
    }

    #[test]
    fn bad_inputs() {
        assert!(prefix_completion_rewrite(TEN, &Fixed(""), 0.0).is_err());
        assert!(prefix_completion_rewrite(TEN, &Fixed(""), 1.0).is_err());
        assert!(prefix_completion_rewrite("  ", &Fixed(""), 0.2).is_err());
    }
}
