//! Penn-Treebank bracketed trees aligned to their source sentence.
//!
//! Trees come from an external constituency parser. Each leaf is aligned
//! left to right against the raw sentence so that every node carries the
//! character span it covers, which lets masking operate on raw text.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{byte_offset, char_len, char_slice};

/// Constituent types that may be masked for rewriting.
pub const ELIGIBLE_LABELS: [&str; 11] = [
    "ADJP", "ADVP", "NP", "PP", "SBAR", "SBARQ", "SINV", "VP", "SQ", "WHNP", "WHPP",
];

/// A bracketed constituency tree node.
///
/// Preterminals carry `token` and no children; inner nodes carry children and
/// no token. A bare token written without a POS tag becomes a leaf with an
/// empty label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseTree {
    pub label: String,
    pub children: Vec<ParseTree>,
    pub token: Option<String>,
    pub char_span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstituentSpan {
    pub label: String,
    pub char_span: (usize, usize),
    pub text: String,
}

impl ParseTree {
    pub fn is_leaf(&self) -> bool {
        self.token.is_some()
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&ParseTree> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a ParseTree>) {
        if self.is_leaf() {
            out.push(self);
        } else {
            for child in &self.children {
                child.collect_leaves(out);
            }
        }
    }

    /// Pre-order traversal (outer before inner, left to right).
    pub fn preorder(&self) -> Vec<&ParseTree> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            out.push(node);
            stack.extend(node.children.iter().rev());
        }
        out
    }
}

/// Label with function tags and co-index suffixes removed (`NP-SBJ-1` → `NP`).
pub fn base_label(label: &str) -> &str {
    if label.starts_with('-') {
        return label;
    }
    match label.find(['-', '=']) {
        Some(i) if i > 0 => &label[..i],
        _ => label,
    }
}

pub fn is_eligible_label(label: &str) -> bool {
    ELIGIBLE_LABELS.contains(&base_label(label))
}

#[derive(Debug, Clone, PartialEq)]
enum Lexeme {
    Open,
    Close,
    Atom(String),
}

fn lex(input: &str) -> Vec<(usize, Lexeme)> {
    let mut out = Vec::new();
    let mut atom_start = None;
    let mut atom = String::new();
    for (pos, c) in input.chars().enumerate() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(start) = atom_start.take() {
                out.push((start, Lexeme::Atom(std::mem::take(&mut atom))));
            }
            match c {
                '(' => out.push((pos, Lexeme::Open)),
                ')' => out.push((pos, Lexeme::Close)),
                _ => {}
            }
        } else {
            atom_start.get_or_insert(pos);
            atom.push(c);
        }
    }
    if let Some(start) = atom_start {
        out.push((start, Lexeme::Atom(atom)));
    }
    out
}

struct TreeReader {
    lexemes: Vec<(usize, Lexeme)>,
    pos: usize,
    input_len: usize,
}

impl TreeReader {
    fn err(&self, message: impl Into<String>) -> Error {
        let position = self
            .lexemes
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.input_len);
        Error::TreeParse {
            position,
            message: message.into(),
        }
    }

    fn node(&mut self) -> Result<ParseTree> {
        match self.lexemes.get(self.pos) {
            Some((_, Lexeme::Open)) => self.pos += 1,
            Some(_) => return Err(self.err("expected '('")),
            None => return Err(self.err("unexpected end of input, expected '('")),
        }
        let label = match self.lexemes.get(self.pos) {
            Some((_, Lexeme::Atom(a))) => {
                let a = a.clone();
                self.pos += 1;
                a
            }
            _ => String::new(),
        };
        let mut children = Vec::new();
        loop {
            match self.lexemes.get(self.pos).cloned() {
                Some((_, Lexeme::Close)) => {
                    self.pos += 1;
                    break;
                }
                Some((_, Lexeme::Open)) => children.push(self.node()?),
                Some((_, Lexeme::Atom(a))) => {
                    self.pos += 1;
                    children.push(ParseTree {
                        label: String::new(),
                        children: Vec::new(),
                        token: Some(a),
                        char_span: (0, 0),
                    });
                }
                None => return Err(self.err("unbalanced brackets: missing ')'")),
            }
        }
        if children.is_empty() {
            return Err(self.err(format!("empty constituent {label:?}")));
        }
        // `(TAG word)` is a preterminal.
        if children.len() == 1 && children[0].is_leaf() && children[0].label.is_empty() {
            let token = children.pop().and_then(|c| c.token);
            return Ok(ParseTree {
                label,
                children: Vec::new(),
                token,
                char_span: (0, 0),
            });
        }
        Ok(ParseTree {
            label,
            children,
            token: None,
            char_span: (0, 0),
        })
    }
}

/// Surface forms a treebank token may take in raw text, most literal first.
fn surface_forms(token: &str) -> Vec<String> {
    let mut forms = vec![token.to_string()];
    let extra: &[&str] = match token.to_ascii_uppercase().as_str() {
        "-LRB-" => &["("],
        "-RRB-" => &[")"],
        "-LSB-" => &["["],
        "-RSB-" => &["]"],
        "-LCB-" => &["{"],
        "-RCB-" => &["}"],
        "``" => &["\"", "\u{201c}"],
        "''" => &["\"", "\u{201d}"],
        "`" => &["'", "\u{2018}"],
        "'" => &["\u{2019}"],
        "--" => &["\u{2013}", "\u{2014}"],
        _ => &[],
    };
    forms.extend(extra.iter().map(|s| s.to_string()));
    if token.contains('\\') {
        forms.push(token.replace("\\/", "/").replace("\\*", "*"));
    }
    forms
}

fn align(node: &mut ParseTree, source: &[char], cursor: &mut usize, index: &mut usize) -> Result<()> {
    if let Some(token) = &node.token {
        if node.label == "-NONE-" {
            node.char_span = (*cursor, *cursor);
            return Ok(());
        }
        while *cursor < source.len() && source[*cursor].is_whitespace() {
            *cursor += 1;
        }
        let matched = surface_forms(token).into_iter().find_map(|form| {
            let n = form.chars().count();
            let end = *cursor + n;
            (end <= source.len() && form.chars().eq(source[*cursor..end].iter().copied()))
                .then_some(end)
        });
        match matched {
            Some(end) => {
                node.char_span = (*cursor, end);
                *cursor = end;
                *index += 1;
                Ok(())
            }
            None => Err(Error::Alignment {
                token: token.clone(),
                index: *index,
                offset: *cursor,
            }),
        }
    } else {
        for child in node.children.iter_mut() {
            align(child, source, cursor, index)?;
        }
        let mut covered = node.children.iter().map(|c| c.char_span).filter(|s| s.0 < s.1);
        node.char_span = match covered.next() {
            Some(first) => {
                let last = covered.last().unwrap_or(first);
                (first.0, last.1)
            }
            None => node.children[0].char_span,
        };
        Ok(())
    }
}

/// Parse a bracketed tree and align its leaves to `source_sentence`.
pub fn parse_bracketed(tree_string: &str, source_sentence: &str) -> Result<ParseTree> {
    let lexemes = lex(tree_string);
    let mut reader = TreeReader {
        lexemes,
        pos: 0,
        input_len: char_len(tree_string),
    };
    let mut tree = reader.node()?;
    if reader.pos < reader.lexemes.len() {
        return Err(reader.err("trailing input after tree"));
    }
    let chars: Vec<char> = source_sentence.chars().collect();
    let mut cursor = 0;
    let mut index = 0;
    align(&mut tree, &chars, &mut cursor, &mut index)?;
    if let Some(rest) = chars[cursor..].iter().position(|c| !c.is_whitespace()) {
        let offset = cursor + rest;
        let leftover: String = chars[offset..]
            .iter()
            .take_while(|c| !c.is_whitespace())
            .collect();
        return Err(Error::Alignment {
            token: leftover,
            index,
            offset,
        });
    }
    Ok(tree)
}

/// Canonical single-space bracketed form.
pub fn serialize(tree: &ParseTree) -> String {
    let mut out = String::new();
    write_node(tree, &mut out);
    out
}

fn write_node(node: &ParseTree, out: &mut String) {
    match &node.token {
        Some(token) if node.label.is_empty() => out.push_str(token),
        Some(token) => {
            out.push('(');
            out.push_str(&node.label);
            out.push(' ');
            out.push_str(token);
            out.push(')');
        }
        None => {
            out.push('(');
            out.push_str(&node.label);
            for child in &node.children {
                out.push(' ');
                write_node(child, out);
            }
            out.push(')');
        }
    }
}

/// Non-terminals of an eligible type, outer before inner, left to right.
///
/// With `exclude_root`, nodes covering the whole aligned sentence are dropped.
/// Zero-width constituents (trace-only) are never returned.
pub fn eligible_constituents(
    tree: &ParseTree,
    sentence: &str,
    exclude_root: bool,
) -> Vec<ConstituentSpan> {
    let full = tree.char_span;
    tree.preorder()
        .into_iter()
        .filter(|node| !node.is_leaf() && is_eligible_label(&node.label))
        .filter(|node| node.char_span.0 < node.char_span.1)
        .filter(|node| !(exclude_root && node.char_span == full))
        .filter_map(|node| {
            let (start, end) = node.char_span;
            let text = char_slice(sentence, start, end).ok()?.to_string();
            Some(ConstituentSpan {
                label: base_label(&node.label).to_string(),
                char_span: node.char_span,
                text,
            })
        })
        .collect()
}

/// Replace the characters in `span` with `replacement`.
pub fn splice(sentence: &str, span: (usize, usize), replacement: &str) -> Result<String> {
    let (start, end) = span;
    let err = || Error::Span {
        start,
        end,
        len: char_len(sentence),
    };
    if start > end {
        return Err(err());
    }
    let b0 = byte_offset(sentence, start).ok_or_else(err)?;
    let b1 = byte_offset(sentence, end).ok_or_else(err)?;
    let mut out = String::with_capacity(sentence.len() + replacement.len());
    out.push_str(&sentence[..b0]);
    out.push_str(replacement);
    out.push_str(&sentence[b1..]);
    Ok(out)
}
