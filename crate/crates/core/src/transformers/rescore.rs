use std::collections::{BTreeMap, HashMap};

use crate::cols;
use crate::frames::{col, sort_and_rank, ColumnSpec, ColumnType, Relation, Value};
use crate::index::tokenize;

use super::{bm25_term_weight, idf, AttrValue, Bm25Params, ParamError, Transformer, TransformerSpec};

/// Collection statistics of one query's candidate texts.
pub(crate) struct CandidateSet {
    n: f64,
    avgdl: f64,
    df: HashMap<String, usize>,
    docs: Vec<(HashMap<String, usize>, usize)>,
}

impl CandidateSet {
    pub(crate) fn new(texts: &[Vec<String>]) -> Self {
        let total: usize = texts.iter().map(Vec::len).sum();
        let n = texts.len() as f64;
        let avgdl = if texts.is_empty() { 0.0 } else { total as f64 / n };
        let mut df: HashMap<String, usize> = HashMap::new();
        let mut docs = Vec::with_capacity(texts.len());
        for toks in texts {
            let mut tf: HashMap<String, usize> = HashMap::new();
            for t in toks {
                *tf.entry(t.clone()).or_insert(0) += 1;
            }
            for t in tf.keys() {
                *df.entry(t.clone()).or_insert(0) += 1;
            }
            docs.push((tf, toks.len()));
        }
        CandidateSet { n, avgdl, df, docs }
    }

    /// BM25 of `query` against candidate `j`.
    pub(crate) fn score(&self, query: &[String], j: usize, k1: f64, b: f64) -> f64 {
        let (tf, len) = &self.docs[j];
        query
            .iter()
            .filter_map(|q| {
                let f = *tf.get(q)?;
                let d = self.df[q];
                Some(bm25_term_weight(
                    f as f64,
                    idf(self.n, d as f64),
                    *len as f64,
                    self.avgdl,
                    k1,
                    b,
                ))
            })
            .sum()
    }
}

/// Re-scores candidates by BM25 computed over each query's candidate set,
/// then re-ranks. A text-only stand-in for a neural re-ranker.
pub fn lexical_rescorer(params: Bm25Params) -> Result<Transformer, ParamError> {
    params.validate()?;
    let d = Bm25Params::default();
    let (k1, b) = (params.k1, params.b);
    let t = Transformer::new(
        "rescore",
        "Re-ranks candidate documents by lexical similarity between the query and each candidate's text, using statistics of the candidate set.",
        TransformerSpec::single(
            cols!["qid", "query", "docno", "text"],
            cols!["qid", "query", "docno", "text", "score", "rank"],
            true,
        ),
        move |rel: &Relation| {
            let qid = rel.require_text(col::QID)?;
            let query = rel.require_text(col::QUERY)?;
            rel.require_text(col::DOCNO)?;
            let text = rel.require_text(col::TEXT)?;

            let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for i in 0..rel.len() {
                groups.entry(rel.text_at(i, qid)).or_default().push(i);
            }
            let mut scores = vec![0.0; rel.len()];
            for rows in groups.values() {
                let texts: Vec<Vec<String>> =
                    rows.iter().map(|&i| tokenize(rel.text_at(i, text))).collect();
                let set = CandidateSet::new(&texts);
                // rows of one qid may carry different query strings
                for (j, &i) in rows.iter().enumerate() {
                    scores[i] = set.score(&tokenize(rel.text_at(i, query)), j, k1, b);
                }
            }
            let scored = rel.with_column(
                ColumnSpec::new(col::SCORE, ColumnType::Float64),
                scores.into_iter().map(Value::Float).collect(),
            )?;
            Ok(sort_and_rank(&scored)?)
        },
    );
    Ok(t.with_param("k1", AttrValue::Float(k1), AttrValue::Float(d.k1))
        .with_param("b", AttrValue::Float(b), AttrValue::Float(d.b)))
}
