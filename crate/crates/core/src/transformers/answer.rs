use std::collections::BTreeMap;

use crate::cols;
use crate::frames::{col, ColumnType, Relation, Schema, Value};

use super::{AttrValue, ParamError, Transformer, TransformerSpec};

/// Text up to and including the first `.`, `?` or `!`; the whole text when
/// there is none. Surrounding whitespace is trimmed.
pub fn first_sentence(text: &str) -> &str {
    match text.find(['.', '?', '!']) {
        Some(i) => text[..=i].trim(),
        None => text.trim(),
    }
}

/// One answer per qid, taken from the first sentence of the best ranked
/// document. Falls back to lower ranked documents, up to `max_passages`,
/// when a text has no usable sentence.
pub fn extractive_answerer(max_passages: usize) -> Result<Transformer, ParamError> {
    if max_passages < 1 {
        return Err(ParamError::new("max_passages", "must be >= 1"));
    }
    let t = Transformer::new(
        "answer",
        "Extractive answer generation: answers each query with the first sentence of its top ranked document.",
        TransformerSpec::single(
            cols!["qid", "query", "docno", "score", "rank", "text"],
            cols!["qid", "qanswer"],
            false,
        ),
        move |rel: &Relation| {
            let qid = rel.require_text(col::QID)?;
            let rank = rel.require_typed(col::RANK, ColumnType::Int64)?;
            let text = rel.require_text(col::TEXT)?;

            let mut groups: BTreeMap<&str, Vec<(i64, usize)>> = BTreeMap::new();
            for (i, row) in rel.rows().iter().enumerate() {
                let r = row[rank].as_i64().unwrap_or(i64::MAX);
                groups.entry(rel.text_at(i, qid)).or_default().push((r, i));
            }
            let rows = groups
                .into_iter()
                .map(|(q, mut cands)| {
                    cands.sort();
                    let answer = cands
                        .iter()
                        .take(max_passages)
                        .map(|&(_, i)| first_sentence(rel.text_at(i, text)))
                        .find(|s| !s.is_empty())
                        .unwrap_or("");
                    vec![Value::Text(q.to_string()), Value::Text(answer.to_string())]
                })
                .collect();
            Ok(Relation::new(Schema::of_names([col::QID, col::QANSWER])?, rows)?)
        },
    );
    Ok(t.with_param("max_passages", AttrValue::Int(max_passages as i64), AttrValue::Int(3)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ranked(rows: &[(&str, i64, &str)]) -> Relation {
        let schema = Schema::of_names(["qid", "query", "docno", "score", "rank", "text"]).unwrap();
        Relation::new(
            schema,
            rows.iter()
                .enumerate()
                .map(|(i, (q, r, t))| {
                    vec![
                        Value::Text(q.to_string()),
                        Value::Text("query".into()),
                        Value::Text(format!("d{i}")),
                        Value::Float(10.0 - *r as f64),
                        Value::Int(*r),
                        Value::Text(t.to_string()),
                    ]
                })
                .collect(),
        )
        .unwrap()
    }

    fn answers(rel: &Relation) -> Vec<(String, String)> {
        rel.rows()
            .iter()
            .map(|r| (r[0].to_string(), r[1].to_string()))
            .collect()
    }

    #[test]
    fn sentence_rule() {
        assert_eq!(
            first_sentence("fox jumps over the lazy dog"),
            "fox jumps over the lazy dog"
        );
        assert_eq!(first_sentence("A. B."), "A.");
        assert_eq!(first_sentence("why? because"), "why?");
        assert_eq!(first_sentence("  "), "");
    }

    #[test]
    fn one_row_per_qid_from_rank_zero() {
        let t = extractive_answerer(3).unwrap();
        let out = t
            .transform(&ranked(&[
                ("q1", 1, "second. doc"),
                ("q1", 0, "fox jumps over the lazy dog"),
                ("q2", 0, "A. B."),
            ]))
            .unwrap();
        assert_eq!(
            answers(&out),
            vec![
                ("q1".into(), "fox jumps over the lazy dog".into()),
                ("q2".into(), "A.".into())
            ]
        );
        assert_eq!(out.columns(), cols!["qid", "qanswer"]);
    }

    #[test]
    fn falls_back_past_empty_texts() {
        let t = extractive_answerer(2).unwrap();
        let out = t
            .transform(&ranked(&[("q1", 0, ""), ("q1", 1, "backup."), ("q1", 2, "third.")]))
            .unwrap();
        assert_eq!(answers(&out), vec![("q1".into(), "backup.".into())]);

        let t = extractive_answerer(1).unwrap();
        let out = t.transform(&ranked(&[("q1", 0, ""), ("q1", 1, "backup.")])).unwrap();
        assert_eq!(answers(&out), vec![("q1".into(), "".into())]);
    }

    #[test]
    fn rejects_zero_passages() {
        assert!(extractive_answerer(0).is_err());
    }
}
