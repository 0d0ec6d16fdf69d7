//! Weighted query strings.
//!
//! ```text
//! wquery := group+
//! group  := "#w(" FLOAT ")" token+ | "#ow(" FLOAT ")" token token
//! ```
//!
//! A string that does not start with `#` is a plain query: its tokens form a
//! single unigram group of weight 1.

use crate::index::tokenize;

use super::TransformError;

#[derive(Debug, Clone, PartialEq)]
pub enum GroupKind {
    Unigrams(Vec<String>),
    OrderedWindow(String, String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub weight: f64,
    pub kind: GroupKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedQuery {
    pub groups: Vec<Group>,
}

fn malformed(position: usize, reason: impl Into<String>) -> TransformError {
    TransformError::MalformedWeightedQuery {
        position,
        reason: reason.into(),
    }
}

pub fn parse_weighted_query(src: &str) -> Result<WeightedQuery, TransformError> {
    if !src.trim_start().starts_with('#') {
        return Ok(WeightedQuery {
            groups: vec![Group {
                weight: 1.0,
                kind: GroupKind::Unigrams(tokenize(src)),
            }],
        });
    }

    // (byte offset, word) for every whitespace-separated word
    let mut words = Vec::new();
    let mut start = None;
    for (i, c) in src.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                words.push((s, &src[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        words.push((s, &src[s..]));
    }

    let mut groups = Vec::new();
    let mut i = 0;
    while i < words.len() {
        let (pos, word) = words[i];
        let (ordered, rest, prefix_len) = if let Some(rest) = word.strip_prefix("#ow(") {
            (true, rest, 4)
        } else if let Some(rest) = word.strip_prefix("#w(") {
            (false, rest, 3)
        } else {
            return Err(malformed(pos, "expected `#w(` or `#ow(`"));
        };
        let Some(close) = rest.find(')') else {
            return Err(malformed(pos + word.len(), "unclosed group weight, expected `)`"));
        };
        if close + 1 != rest.len() {
            return Err(malformed(pos + prefix_len + close + 1, "expected space after `)`"));
        }
        let weight: f64 = rest[..close]
            .parse()
            .ok()
            .filter(|w: &f64| w.is_finite())
            .ok_or_else(|| malformed(pos + prefix_len, "invalid weight"))?;
        i += 1;

        let mut tokens = Vec::new();
        while i < words.len() && !words[i].1.starts_with('#') {
            let (tpos, tok) = words[i];
            if tokenize(tok) != [tok] {
                return Err(malformed(tpos, format!("`{tok}` is not a normalized token")));
            }
            tokens.push(tok.to_string());
            i += 1;
        }
        let end = words.get(i).map_or(src.len(), |w| w.0);
        let kind = if ordered {
            if tokens.len() != 2 {
                return Err(malformed(
                    end,
                    format!("`#ow` takes exactly 2 tokens, found {}", tokens.len()),
                ));
            }
            let second = tokens.pop().expect("two tokens");
            let first = tokens.pop().expect("two tokens");
            GroupKind::OrderedWindow(first, second)
        } else {
            if tokens.is_empty() {
                return Err(malformed(end, "`#w` needs at least one token"));
            }
            GroupKind::Unigrams(tokens)
        };
        groups.push(Group { weight, kind });
    }
    Ok(WeightedQuery { groups })
}
