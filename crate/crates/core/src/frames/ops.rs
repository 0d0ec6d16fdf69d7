use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};

use super::{classify_columns, col, BaseKind, ColumnSpec, ColumnType, FrameError, Relation, Value};

/// Anything that can look up stored document text by docno.
pub trait TextStore {
    fn text_of(&self, docno: &str) -> Option<&str>;
}

impl TextStore for HashMap<String, String> {
    fn text_of(&self, docno: &str) -> Option<&str> {
        self.get(docno).map(String::as_str)
    }
}

impl TextStore for BTreeMap<String, String> {
    fn text_of(&self, docno: &str) -> Option<&str> {
        self.get(docno).map(String::as_str)
    }
}

/// Sorts by (qid asc, score desc, docno asc) and writes a 0-based `rank`
/// per qid group. Appends `rank` if absent; all other columns are preserved.
pub fn sort_and_rank(rel: &Relation) -> Result<Relation, FrameError> {
    let qid = rel.require_text(col::QID)?;
    let docno = rel.require_text(col::DOCNO)?;
    let score = rel.require_typed(col::SCORE, ColumnType::Float64)?;

    // `+ 0.0` folds -0.0 into 0.0 so equal-looking scores tie on docno
    let score_of = |row: &[Value]| row[score].as_f64().unwrap_or(f64::NEG_INFINITY) + 0.0;
    let mut rows: Vec<Vec<Value>> = rel.rows().to_vec();
    rows.sort_by(|a, b| {
        let qa = a[qid].as_text().unwrap_or("");
        let qb = b[qid].as_text().unwrap_or("");
        qa.cmp(qb)
            .then_with(|| score_of(b).total_cmp(&score_of(a)))
            .then_with(|| a[docno].as_text().unwrap_or("").cmp(b[docno].as_text().unwrap_or("")))
    });

    let mut ranks = Vec::with_capacity(rows.len());
    let mut current: Option<&str> = None;
    let mut next = 0i64;
    for row in &rows {
        let q = row[qid].as_text().unwrap_or("");
        if current != Some(q) {
            current = Some(q);
            next = 0;
        }
        ranks.push(Value::Int(next));
        next += 1;
    }

    let sorted = Relation::new(rel.schema().clone(), rows)?;
    sorted.with_column(ColumnSpec::new(col::RANK, ColumnType::Int64), ranks)
}

/// Appends (or replaces) a `text` column looked up by docno.
pub fn join_on_docno<S: TextStore + ?Sized>(left: &Relation, docs: &S) -> Result<Relation, FrameError> {
    let docno = left.require_text(col::DOCNO)?;
    let texts = left
        .rows()
        .iter()
        .map(|row| {
            let d = row[docno].as_text().unwrap_or("");
            docs.text_of(d)
                .map(|t| Value::Text(t.to_string()))
                .ok_or_else(|| FrameError::UnknownDocno(d.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    left.with_column(ColumnSpec::new(col::TEXT, ColumnType::Text), texts)
}

/// Checks the primary-key and rank invariants implied by the relation's
/// frame kind.
pub fn check_invariants(rel: &Relation) -> Result<(), FrameError> {
    let kind = classify_columns(&rel.columns());
    let text_key = |name: &str, row: &[Value]| -> String {
        rel.index_of(name)
            .and_then(|i| row[i].as_text())
            .unwrap_or("")
            .to_string()
    };
    match kind.base() {
        Some(BaseKind::Query) | Some(BaseKind::Answer) => {
            let mut seen = HashSet::new();
            for row in rel.rows() {
                let q = text_key(col::QID, row);
                if !seen.insert(q.clone()) {
                    return Err(FrameError::Invariant(format!("duplicate qid `{q}`")));
                }
            }
        }
        Some(BaseKind::Result) => {
            let mut seen = HashSet::new();
            for row in rel.rows() {
                let key = (text_key(col::QID, row), text_key(col::DOCNO, row));
                if !seen.insert(key.clone()) {
                    return Err(FrameError::Invariant(format!(
                        "duplicate (qid, docno) `({}, {})`",
                        key.0, key.1
                    )));
                }
            }
        }
        Some(BaseKind::Document) => {
            let mut seen = HashSet::new();
            for row in rel.rows() {
                let d = text_key(col::DOCNO, row);
                if !seen.insert(d.clone()) {
                    return Err(FrameError::Invariant(format!("duplicate docno `{d}`")));
                }
            }
        }
        None => {}
    }

    if let (Some(rank), Some(qid)) = (rel.index_of(col::RANK), rel.index_of(col::QID)) {
        let score = rel.index_of(col::SCORE);
        let mut groups: BTreeMap<&str, Vec<(i64, Option<f64>)>> = BTreeMap::new();
        for row in rel.rows() {
            let r = row[rank]
                .as_i64()
                .ok_or_else(|| FrameError::Invariant("null rank".into()))?;
            groups
                .entry(row[qid].as_text().unwrap_or(""))
                .or_default()
                .push((r, score.and_then(|s| row[s].as_f64())));
        }
        for (q, mut entries) in groups {
            entries.sort_by_key(|e| e.0);
            for (i, (r, _)) in entries.iter().enumerate() {
                if *r != i as i64 {
                    return Err(FrameError::Invariant(format!(
                        "ranks for qid `{q}` are not 0..{}",
                        entries.len()
                    )));
                }
            }
            for pair in entries.windows(2) {
                if let (Some(a), Some(b)) = (pair[0].1, pair[1].1) {
                    if (a + 0.0).total_cmp(&(b + 0.0)) == Ordering::Less {
                        return Err(FrameError::Invariant(format!(
                            "score increases with rank for qid `{q}`"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}
