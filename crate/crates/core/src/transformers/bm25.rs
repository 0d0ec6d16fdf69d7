use std::collections::HashMap;
use std::sync::Arc;

use crate::cols;
use crate::frames::{col, sort_and_rank, Relation, Schema, Value};
use crate::index::{tokenize, Index};

use super::wquery::{parse_weighted_query, Group, GroupKind};
use super::{AttrValue, ParamError, TransformError, Transformer, TransformerSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
    pub num_results: usize,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params {
            k1: 1.2,
            b: 0.75,
            num_results: 1000,
        }
    }
}

impl Bm25Params {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.k1 >= 0.0 && self.k1.is_finite()) {
            return Err(ParamError::new("k1", "must be a finite value >= 0"));
        }
        if !(0.0..=1.0).contains(&self.b) {
            return Err(ParamError::new("b", "must lie in [0, 1]"));
        }
        if self.num_results < 1 {
            return Err(ParamError::new("num_results", "must be >= 1"));
        }
        Ok(())
    }
}

/// `ln(1 + (N - df + 0.5) / (df + 0.5))`, never negative.
pub fn idf(n_docs: f64, df: f64) -> f64 {
    (1.0 + (n_docs - df + 0.5) / (df + 0.5)).ln()
}

/// Contribution of one query term occurrence to a document's score.
pub fn bm25_term_weight(tf: f64, idf: f64, doc_len: f64, avg_doc_len: f64, k1: f64, b: f64) -> f64 {
    let norm = if avg_doc_len > 0.0 { doc_len / avg_doc_len } else { 1.0 };
    idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * norm))
}

/// Scores every document matching at least one group. Each group's BM25 sum
/// is multiplied by its weight before being added to the document total.
fn score_groups(index: &Index, groups: &[Group], params: &Bm25Params) -> HashMap<u32, f64> {
    let stats = index.stats();
    let n = stats.n_docs as f64;
    let mut totals: HashMap<u32, f64> = HashMap::new();
    for group in groups {
        let mut acc: HashMap<u32, f64> = HashMap::new();
        let mut add = |doc_id: u32, tf: f64, df: f64| {
            let dl = index.doc(doc_id).map_or(0.0, |d| d.doc_len as f64);
            let w = bm25_term_weight(tf, idf(n, df), dl, stats.avg_doc_len, params.k1, params.b);
            *acc.entry(doc_id).or_insert(0.0) += w;
        };
        match &group.kind {
            GroupKind::Unigrams(tokens) => {
                for t in tokens {
                    let postings = index.postings(t);
                    let df = postings.len() as f64;
                    for p in postings {
                        add(p.doc_id, p.tf as f64, df);
                    }
                }
            }
            GroupKind::OrderedWindow(t1, t2) => {
                let matches = index.ordered_window_postings(t1, t2);
                let df = matches.len() as f64;
                for (doc_id, count) in matches {
                    add(doc_id, count as f64, df);
                }
            }
        }
        for (doc_id, s) in acc {
            *totals.entry(doc_id).or_insert(0.0) += group.weight * s;
        }
    }
    totals
}

fn retrieve(index: &Index, params: &Bm25Params, weighted: bool, input: &Relation) -> Result<Relation, TransformError> {
    let qid_col = input.require_text(col::QID)?;
    let query_col = input.require_text(col::QUERY)?;
    let mut rows = Vec::new();
    for i in 0..input.len() {
        let qid = input.text_at(i, qid_col);
        let query = input.text_at(i, query_col);
        let groups = if weighted {
            parse_weighted_query(query)?.groups
        } else {
            vec![Group {
                weight: 1.0,
                kind: GroupKind::Unigrams(tokenize(query)),
            }]
        };
        let mut scored: Vec<(&str, f64)> = score_groups(index, &groups, params)
            .into_iter()
            .filter_map(|(id, s)| index.doc(id).map(|d| (d.docno.as_str(), s)))
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        scored.truncate(params.num_results);
        for (docno, score) in scored {
            rows.push(vec![
                Value::Text(qid.to_string()),
                Value::Text(query.to_string()),
                Value::Text(docno.to_string()),
                Value::Int(0),
                Value::Float(score),
            ]);
        }
    }
    let schema = Schema::of_names([col::QID, col::QUERY, col::DOCNO, col::RANK, col::SCORE])?;
    Ok(sort_and_rank(&Relation::new(schema, rows)?)?)
}

fn retriever_spec() -> TransformerSpec {
    TransformerSpec::single(
        cols!["qid", "query"],
        cols!["qid", "query", "docno", "rank", "score"],
        false,
    )
}

fn with_bm25_params(t: Transformer, p: &Bm25Params) -> Transformer {
    let d = Bm25Params::default();
    t.with_param("k1", AttrValue::Float(p.k1), AttrValue::Float(d.k1))
        .with_param("b", AttrValue::Float(p.b), AttrValue::Float(d.b))
        .with_param(
            "num_results",
            AttrValue::Int(p.num_results as i64),
            AttrValue::Int(d.num_results as i64),
        )
}

/// BM25 retrieval over the index for each `(qid, query)` row.
///
/// Repeated query tokens each contribute, so `fox fox` weighs `fox` twice.
pub fn bm25_retriever(index: Arc<Index>, params: Bm25Params) -> Result<Transformer, ParamError> {
    params.validate()?;
    let t = Transformer::new(
        "bm25",
        "Lexical BM25 retrieval: scores indexed documents against each query and returns the top ranked results.",
        retriever_spec(),
        move |rel| retrieve(&index, &params, false, rel),
    );
    Ok(with_bm25_params(t, &params))
}

/// BM25 retrieval that also understands weighted `#w(..)` / `#ow(..)` query
/// strings. Plain queries score exactly as [`bm25_retriever`].
pub fn weighted_bm25_retriever(index: Arc<Index>, params: Bm25Params) -> Result<Transformer, ParamError> {
    params.validate()?;
    let t = Transformer::new(
        "wbm25",
        "BM25 retrieval over weighted query strings: unigram groups and ordered-window term pairs, each scaled by its weight.",
        retriever_spec(),
        move |rel| retrieve(&index, &params, true, rel),
    );
    Ok(with_bm25_params(t, &params))
}
