//! BM25 computed directly from the formula over the raw TOY5 strings.

use std::collections::BTreeMap;

use flowrank::Relation;

use super::TOY5;

/// BM25 written straight from the formula over the raw corpus strings.
pub struct Oracle {
    pub docs: Vec<(String, Vec<String>)>,
    pub avgdl: f64,
}

impl Oracle {
    pub fn new() -> Self {
        let docs: Vec<(String, Vec<String>)> = TOY5
            .iter()
            .map(|(d, t)| (d.to_string(), t.split_whitespace().map(String::from).collect()))
            .collect();
        let total: usize = docs.iter().map(|(_, t)| t.len()).sum();
        let avgdl = total as f64 / docs.len() as f64;
        Oracle { docs, avgdl }
    }

    pub fn weight(&self, tf: f64, df: f64, dl: f64) -> f64 {
        let (k1, b, n) = (1.2, 0.75, self.docs.len() as f64);
        let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
        idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / self.avgdl))
    }

    pub fn unigrams(&self, terms: &[&str]) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for term in terms {
            let df = self.docs.iter().filter(|(_, t)| t.iter().any(|w| w == term)).count() as f64;
            for (docno, toks) in &self.docs {
                let tf = toks.iter().filter(|w| w == term).count() as f64;
                if tf > 0.0 {
                    *out.entry(docno.clone()).or_insert(0.0) += self.weight(tf, df, toks.len() as f64);
                }
            }
        }
        out
    }

    pub fn window(&self, a: &str, b: &str) -> BTreeMap<String, f64> {
        let count = |toks: &[String]| toks.windows(2).filter(|w| w[0] == a && w[1] == b).count() as f64;
        let df = self.docs.iter().filter(|(_, t)| count(t) > 0.0).count() as f64;
        self.docs
            .iter()
            .filter(|(_, t)| count(t) > 0.0)
            .map(|(d, t)| (d.clone(), self.weight(count(t), df, t.len() as f64)))
            .collect()
    }
}

/// docno → score for one qid.
pub fn scores(rel: &Relation, qid: &str) -> BTreeMap<String, f64> {
    let q = rel.index_of("qid").unwrap();
    let d = rel.index_of("docno").unwrap();
    let s = rel.index_of("score").unwrap();
    rel.rows()
        .iter()
        .filter(|r| r[q].as_text() == Some(qid))
        .map(|r| (r[d].as_text().unwrap().to_string(), r[s].as_f64().unwrap()))
        .collect()
}
