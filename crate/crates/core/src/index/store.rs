use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DocRecord, Index, IndexError, IndexStats, Posting, TermEntry};

pub const FORMAT_VERSION: u64 = 1;

const META: &str = "meta.json";
const DOCS: &str = "docs.jsonl";
const POSTINGS: &str = "postings.jsonl";

#[derive(Serialize, Deserialize)]
struct Meta {
    format_version: u64,
    n_docs: u64,
    total_tokens: u64,
    avg_doc_len: f64,
}

#[derive(Serialize, Deserialize)]
struct PostingsLine {
    term: String,
    df: u64,
    cf: u64,
    postings: Vec<(u32, u32, Vec<u32>)>,
}

#[derive(Deserialize)]
struct CorpusLine {
    docno: String,
    text: String,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IndexError + '_ {
    move |source| IndexError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn corrupt(file: &str, reason: impl Into<String>) -> IndexError {
    IndexError::CorruptIndex {
        file: file.to_string(),
        reason: reason.into(),
    }
}

/// Parses the corpus JSONL format: one `{"docno":…,"text":…}` per line.
pub fn parse_corpus(input: &str) -> Result<Vec<(String, String)>, IndexError> {
    input
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str::<CorpusLine>(line)
                .map(|c| (c.docno, c.text))
                .map_err(|e| IndexError::Corpus {
                    line: i + 1,
                    reason: e.to_string(),
                })
        })
        .collect()
}

pub fn read_corpus_file(path: &Path) -> Result<Vec<(String, String)>, IndexError> {
    let content = fs::read_to_string(path).map_err(io_err(path))?;
    parse_corpus(&content)
}

impl Index {
    /// Writes the three index files into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<(), IndexError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;

        let meta = Meta {
            format_version: FORMAT_VERSION,
            n_docs: self.stats.n_docs,
            total_tokens: self.stats.total_tokens,
            avg_doc_len: self.stats.avg_doc_len,
        };
        let path = dir.join(META);
        let mut body = serde_json::to_string(&meta).expect("meta serializes");
        body.push('\n');
        fs::write(&path, body).map_err(io_err(&path))?;

        let mut body = String::new();
        for doc in &self.docs {
            body.push_str(&serde_json::to_string(doc).expect("doc serializes"));
            body.push('\n');
        }
        let path = dir.join(DOCS);
        fs::write(&path, body).map_err(io_err(&path))?;

        let mut body = String::new();
        for (term, entry) in &self.lexicon {
            let line = PostingsLine {
                term: term.clone(),
                df: entry.df,
                cf: entry.cf,
                postings: entry
                    .postings
                    .iter()
                    .map(|p| (p.doc_id, p.tf, p.positions.clone()))
                    .collect(),
            };
            body.push_str(&serde_json::to_string(&line).expect("postings serialize"));
            body.push('\n');
        }
        let path = dir.join(POSTINGS);
        fs::write(&path, body).map_err(io_err(&path))?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Index, IndexError> {
        let read = |name: &str| {
            let path = dir.join(name);
            fs::read_to_string(&path).map_err(io_err(&path))
        };
        let mut index = Index::from_files(&read(META)?, &read(DOCS)?, &read(POSTINGS)?)?;
        index.location = Some(dir.to_path_buf());
        Ok(index)
    }

    /// Decodes and cross-checks the contents of the three index files.
    pub fn from_files(meta: &str, docs: &str, postings: &str) -> Result<Index, IndexError> {
        let raw: serde_json::Value = serde_json::from_str(meta).map_err(|e| corrupt(META, e.to_string()))?;
        let found = raw
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| corrupt(META, "missing format_version"))?;
        if found != FORMAT_VERSION {
            return Err(IndexError::VersionMismatch {
                found,
                expected: FORMAT_VERSION,
            });
        }
        let meta: Meta = serde_json::from_value(raw).map_err(|e| corrupt(META, e.to_string()))?;

        let mut records = Vec::new();
        let mut by_docno = HashMap::new();
        for (i, line) in docs.lines().enumerate() {
            let doc: DocRecord =
                serde_json::from_str(line).map_err(|e| corrupt(DOCS, format!("line {}: {e}", i + 1)))?;
            if doc.doc_id as usize != i {
                return Err(corrupt(
                    DOCS,
                    format!("line {}: doc_id {} out of order", i + 1, doc.doc_id),
                ));
            }
            if by_docno.insert(doc.docno.clone(), doc.doc_id).is_some() {
                return Err(corrupt(DOCS, format!("duplicate docno `{}`", doc.docno)));
            }
            records.push(doc);
        }
        let n_docs = records.len() as u64;
        let total: u64 = records.iter().map(|d| d.doc_len as u64).sum();
        if n_docs == 0 {
            return Err(corrupt(DOCS, "no documents"));
        }
        if meta.n_docs != n_docs || meta.total_tokens != total {
            return Err(corrupt(META, "counts disagree with docs.jsonl"));
        }
        let avg = total as f64 / n_docs as f64;
        if meta.avg_doc_len != avg {
            return Err(corrupt(META, "avg_doc_len disagrees with docs.jsonl"));
        }

        let mut lexicon = BTreeMap::new();
        let mut cf_total = 0u64;
        let mut previous: Option<String> = None;
        for (i, line) in postings.lines().enumerate() {
            let at = |reason: String| corrupt(POSTINGS, format!("line {}: {reason}", i + 1));
            let pl: PostingsLine = serde_json::from_str(line).map_err(|e| at(e.to_string()))?;
            if previous.as_deref().is_some_and(|p| p >= pl.term.as_str()) {
                return Err(at(format!("term `{}` out of order", pl.term)));
            }
            if pl.df != pl.postings.len() as u64 {
                return Err(at("df does not match postings length".into()));
            }
            let mut cf = 0u64;
            let mut last_doc: Option<u32> = None;
            let mut list = Vec::with_capacity(pl.postings.len());
            for (doc_id, tf, positions) in pl.postings {
                let Some(doc) = records.get(doc_id as usize) else {
                    return Err(at(format!("doc_id {doc_id} out of range")));
                };
                if last_doc.is_some_and(|d| d >= doc_id) {
                    return Err(at("postings not ascending by doc_id".into()));
                }
                if tf as usize != positions.len() || tf == 0 {
                    return Err(at("tf does not match positions".into()));
                }
                if !positions.windows(2).all(|w| w[0] < w[1]) || positions.last().is_some_and(|&p| p >= doc.doc_len) {
                    return Err(at("positions not strictly ascending within the document".into()));
                }
                cf += tf as u64;
                last_doc = Some(doc_id);
                list.push(Posting { doc_id, tf, positions });
            }
            if cf != pl.cf {
                return Err(at("cf does not match sum of tf".into()));
            }
            cf_total += cf;
            previous = Some(pl.term.clone());
            lexicon.insert(
                pl.term,
                TermEntry {
                    df: pl.df,
                    cf,
                    postings: list,
                },
            );
        }
        if cf_total != total {
            return Err(corrupt(POSTINGS, "collection frequencies do not sum to total_tokens"));
        }

        Ok(Index {
            stats: IndexStats {
                n_docs,
                avg_doc_len: avg,
                total_tokens: total,
            },
            docs: records,
            by_docno,
            lexicon,
            location: None,
        })
    }
}
