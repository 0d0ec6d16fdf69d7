//! Relational data model shared by every transformer.
//!
//! A [`Relation`] is an ordered list of rows under a [`Schema`]. Relations are
//! immutable values: every operation returns a new one.

mod columns;
mod io;
mod kind;
mod ops;

pub use columns::{canonical_rank, default_ctype, ColumnSet, ColumnSpec, ColumnType, Schema};
pub use io::{format_float, parse_topics, relation_to_json_rows, value_to_json, write_trec_run, write_tsv};
pub use kind::{classify_columns, classify_frame, BaseKind, FrameKind};
pub use ops::{check_invariants, join_on_docno, sort_and_rank, TextStore};

use std::fmt;

use thiserror::Error;

/// Well-known column names.
pub mod col {
    pub const QID: &str = "qid";
    pub const QUERY: &str = "query";
    pub const DOCNO: &str = "docno";
    pub const TEXT: &str = "text";
    pub const SCORE: &str = "score";
    pub const RANK: &str = "rank";
    pub const QANSWER: &str = "qanswer";
    pub const QUERY_VEC: &str = "query_vec";
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("missing column `{column}` (present: {present})")]
    MissingColumn { column: String, present: ColumnSet },
    #[error("column `{column}` has type {actual}, expected {expected}")]
    ColumnType {
        column: String,
        expected: ColumnType,
        actual: ColumnType,
    },
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("empty column name")]
    EmptyColumnName,
    #[error("row {row} has {actual} values, schema has {expected} columns")]
    RowWidth { row: usize, expected: usize, actual: usize },
    #[error("row {row}, column `{column}`: value does not match type {expected}")]
    ValueType {
        row: usize,
        column: String,
        expected: ColumnType,
    },
    #[error("unknown docno `{0}`")]
    UnknownDocno(String),
    #[error("frame invariant violated: {0}")]
    Invariant(String),
    #[error("topics line {line}: {reason}")]
    Topics { line: usize, reason: String },
}

/// A single cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Text(String),
    Float(f64),
    Int(i64),
    Vector(Vec<f64>),
}

impl Value {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Float(x) => Some(*x),
            Value::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    fn fits(&self, ctype: ColumnType) -> bool {
        matches!(
            (self, ctype),
            (Value::Null, _)
                | (Value::Text(_), ColumnType::Text)
                | (Value::Float(_), ColumnType::Float64)
                | (Value::Int(_), ColumnType::Int64)
                | (Value::Vector(_), ColumnType::FloatVector)
        )
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("null"),
            Value::Text(s) => f.write_str(s),
            Value::Float(x) => f.write_str(&format_float(*x)),
            Value::Int(i) => write!(f, "{i}"),
            Value::Vector(v) => {
                f.write_str("[")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(&format_float(*x))?;
                }
                f.write_str("]")
            }
        }
    }
}

pub type Row = Vec<Value>;

/// Ordered rows under a schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    schema: Schema,
    rows: Vec<Row>,
}

impl Relation {
    /// Builds a relation, checking row width and value types.
    ///
    /// Nulls are accepted in any column; frame-level checks live in
    /// [`check_invariants`].
    pub fn new(schema: Schema, rows: Vec<Row>) -> Result<Self, FrameError> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(FrameError::RowWidth {
                    row: i,
                    expected: schema.len(),
                    actual: row.len(),
                });
            }
            for (value, spec) in row.iter().zip(schema.columns()) {
                if !value.fits(spec.ctype) {
                    return Err(FrameError::ValueType {
                        row: i,
                        column: spec.name.clone(),
                        expected: spec.ctype,
                    });
                }
            }
        }
        Ok(Relation { schema, rows })
    }

    pub fn empty(schema: Schema) -> Self {
        Relation {
            schema,
            rows: Vec::new(),
        }
    }

    /// A query frame from `(qid, query)` pairs.
    pub fn from_queries<Q, S>(queries: impl IntoIterator<Item = (Q, S)>) -> Self
    where
        Q: Into<String>,
        S: Into<String>,
    {
        let schema = Schema::of_names([col::QID, col::QUERY]).expect("static schema");
        let rows = queries
            .into_iter()
            .map(|(q, s)| vec![Value::Text(q.into()), Value::Text(s.into())])
            .collect();
        Relation { schema, rows }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn columns(&self) -> ColumnSet {
        self.schema.column_set()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.schema.index_of(name)
    }

    /// Index of a column that must be present.
    pub fn require(&self, name: &str) -> Result<usize, FrameError> {
        self.index_of(name).ok_or_else(|| FrameError::MissingColumn {
            column: name.to_string(),
            present: self.columns(),
        })
    }

    /// Index of a required text column.
    pub fn require_text(&self, name: &str) -> Result<usize, FrameError> {
        self.require_typed(name, ColumnType::Text)
    }

    pub fn require_typed(&self, name: &str, ctype: ColumnType) -> Result<usize, FrameError> {
        let idx = self.require(name)?;
        let actual = self.schema.columns()[idx].ctype;
        if actual != ctype {
            return Err(FrameError::ColumnType {
                column: name.to_string(),
                expected: ctype,
                actual,
            });
        }
        Ok(idx)
    }

    /// Text cell, treating null as the empty string.
    pub fn text_at(&self, row: usize, col: usize) -> &str {
        self.rows[row][col].as_text().unwrap_or("")
    }

    /// Returns a copy with `values` written into column `spec.name`, replacing
    /// it in place if present or appending it otherwise.
    pub fn with_column(&self, spec: ColumnSpec, values: Vec<Value>) -> Result<Relation, FrameError> {
        if values.len() != self.rows.len() {
            return Err(FrameError::Invariant(format!(
                "column `{}` has {} values for {} rows",
                spec.name,
                values.len(),
                self.rows.len()
            )));
        }
        let mut columns = self.schema.columns().to_vec();
        let mut rows = self.rows.clone();
        match self.index_of(&spec.name) {
            Some(idx) => {
                columns[idx] = spec;
                for (row, v) in rows.iter_mut().zip(values) {
                    row[idx] = v;
                }
            }
            None => {
                columns.push(spec);
                for (row, v) in rows.iter_mut().zip(values) {
                    row.push(v);
                }
            }
        }
        Relation::new(Schema::new(columns)?, rows)
    }
}
