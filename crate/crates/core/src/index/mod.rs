//! Positional inverted index with stored document text.
//!
//! The on-disk layout is three UTF-8 files: `meta.json`, `docs.jsonl` and
//! `postings.jsonl`. Building the same corpus twice yields byte-identical
//! files.

mod store;

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frames::TextStore;

pub use store::{parse_corpus, read_corpus_file, FORMAT_VERSION};

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("duplicate docno `{0}`")]
    DuplicateDocno(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("corrupt index file {file}: {reason}")]
    CorruptIndex { file: String, reason: String },
    #[error("index format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },
    #[error("corpus line {line}: {reason}")]
    Corpus { line: usize, reason: String },
}

/// Lowercases and splits on any non-alphanumeric character.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Posting {
    pub doc_id: u32,
    pub tf: u32,
    /// Strictly ascending token offsets; `tf == positions.len()`.
    pub positions: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TermEntry {
    pub df: u64,
    pub cf: u64,
    pub postings: Vec<Posting>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexStats {
    pub n_docs: u64,
    pub avg_doc_len: f64,
    pub total_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocRecord {
    pub doc_id: u32,
    pub docno: String,
    pub doc_len: u32,
    pub text: String,
}

/// Read-only index handle. Safe to share across threads.
#[derive(Debug, Clone)]
pub struct Index {
    stats: IndexStats,
    docs: Vec<DocRecord>,
    by_docno: HashMap<String, u32>,
    lexicon: BTreeMap<String, TermEntry>,
    location: Option<PathBuf>,
}

static NO_POSTINGS: [Posting; 0] = [];

impl Index {
    /// Builds an in-memory index. Documents get dense ids in corpus order.
    pub fn build<I, D, T>(corpus: I) -> Result<Index, IndexError>
    where
        I: IntoIterator<Item = (D, T)>,
        D: Into<String>,
        T: Into<String>,
    {
        let mut docs = Vec::new();
        let mut by_docno = HashMap::new();
        let mut lexicon: BTreeMap<String, TermEntry> = BTreeMap::new();
        let mut total_tokens = 0u64;

        for (docno, text) in corpus {
            let docno = docno.into();
            let text = text.into();
            let doc_id = docs.len() as u32;
            if by_docno.insert(docno.clone(), doc_id).is_some() {
                return Err(IndexError::DuplicateDocno(docno));
            }
            let tokens = tokenize(&text);
            let mut positions: BTreeMap<&str, Vec<u32>> = BTreeMap::new();
            for (pos, tok) in tokens.iter().enumerate() {
                positions.entry(tok).or_default().push(pos as u32);
            }
            for (term, positions) in positions {
                let entry = lexicon.entry(term.to_string()).or_default();
                entry.df += 1;
                entry.cf += positions.len() as u64;
                entry.postings.push(Posting {
                    doc_id,
                    tf: positions.len() as u32,
                    positions,
                });
            }
            total_tokens += tokens.len() as u64;
            docs.push(DocRecord {
                doc_id,
                docno,
                doc_len: tokens.len() as u32,
                text,
            });
        }

        if docs.is_empty() {
            return Err(IndexError::EmptyCorpus);
        }
        let n_docs = docs.len() as u64;
        Ok(Index {
            stats: IndexStats {
                n_docs,
                avg_doc_len: total_tokens as f64 / n_docs as f64,
                total_tokens,
            },
            docs,
            by_docno,
            lexicon,
            location: None,
        })
    }

    pub fn stats(&self) -> IndexStats {
        self.stats
    }

    /// Directory the index was loaded from or written to, if any.
    pub fn location(&self) -> Option<&Path> {
        self.location.as_deref()
    }

    pub fn term(&self, term: &str) -> Option<&TermEntry> {
        self.lexicon.get(term)
    }

    /// Postings ascending by doc id; empty for unseen terms.
    pub fn postings(&self, term: &str) -> &[Posting] {
        self.lexicon
            .get(term)
            .map_or(&NO_POSTINGS[..], |e| e.postings.as_slice())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, &TermEntry)> {
        self.lexicon.iter().map(|(t, e)| (t.as_str(), e))
    }

    pub fn doc(&self, doc_id: u32) -> Option<&DocRecord> {
        self.docs.get(doc_id as usize)
    }

    pub fn docs(&self) -> &[DocRecord] {
        &self.docs
    }

    pub fn doc_by_docno(&self, docno: &str) -> Option<&DocRecord> {
        self.by_docno.get(docno).and_then(|&id| self.doc(id))
    }

    pub fn text(&self, docno: &str) -> Option<&str> {
        self.doc_by_docno(docno).map(|d| d.text.as_str())
    }

    /// `(docno, text)` pairs in doc id order.
    pub fn corpus(&self) -> impl Iterator<Item = (&str, &str)> {
        self.docs.iter().map(|d| (d.docno.as_str(), d.text.as_str()))
    }

    fn positions(&self, term: &str, doc_id: u32) -> &[u32] {
        let postings = self.postings(term);
        match postings.binary_search_by_key(&doc_id, |p| p.doc_id) {
            Ok(i) => &postings[i].positions,
            Err(_) => &[],
        }
    }

    /// Number of positions `p` with `t1` at `p` and `t2` at `p + 1`.
    pub fn ordered_window_count(&self, t1: &str, t2: &str, doc_id: u32) -> u64 {
        adjacent_pairs(self.positions(t1, doc_id), self.positions(t2, doc_id))
    }

    /// Documents containing `t1 t2` adjacently, with their counts, ascending
    /// by doc id.
    pub fn ordered_window_postings(&self, t1: &str, t2: &str) -> Vec<(u32, u64)> {
        let (a, b) = (self.postings(t1), self.postings(t2));
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            match a[i].doc_id.cmp(&b[j].doc_id) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let n = adjacent_pairs(&a[i].positions, &b[j].positions);
                    if n > 0 {
                        out.push((a[i].doc_id, n));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }
}

impl TextStore for Index {
    fn text_of(&self, docno: &str) -> Option<&str> {
        self.text(docno)
    }
}

fn adjacent_pairs(first: &[u32], second: &[u32]) -> u64 {
    let mut j = 0;
    let mut count = 0;
    for &p in first {
        while j < second.len() && second[j] <= p {
            j += 1;
        }
        if j < second.len() && second[j] == p + 1 {
            count += 1;
        }
    }
    count
}

/// Builds the index and writes it to `out_dir`.
pub fn build_index<I, D, T>(corpus: I, out_dir: &Path) -> Result<IndexStats, IndexError>
where
    I: IntoIterator<Item = (D, T)>,
    D: Into<String>,
    T: Into<String>,
{
    let index = Index::build(corpus)?;
    index.write(out_dir)?;
    Ok(index.stats())
}

pub fn load_index(dir: &Path) -> Result<Index, IndexError> {
    Index::load(dir)
}
