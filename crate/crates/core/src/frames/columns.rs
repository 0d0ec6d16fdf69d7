use std::collections::BTreeSet;
use std::fmt;

use super::{col, FrameError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnType {
    Text,
    Float64,
    Int64,
    FloatVector,
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnType::Text => "text",
            ColumnType::Float64 => "float64",
            ColumnType::Int64 => "int64",
            ColumnType::FloatVector => "float-vector",
        })
    }
}

/// Type the framework assigns to a column by name. Unknown columns are text.
pub fn default_ctype(name: &str) -> ColumnType {
    match name {
        col::SCORE => ColumnType::Float64,
        col::RANK => ColumnType::Int64,
        col::QUERY_VEC => ColumnType::FloatVector,
        _ => ColumnType::Text,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSpec {
    pub name: String,
    pub ctype: ColumnType,
}

impl ColumnSpec {
    pub fn new(name: impl Into<String>, ctype: ColumnType) -> Self {
        ColumnSpec {
            name: name.into(),
            ctype,
        }
    }

    /// Spec with the framework's default type for `name`.
    pub fn named(name: impl Into<String>) -> Self {
        let name = name.into();
        let ctype = default_ctype(&name);
        ColumnSpec { name, ctype }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Schema {
    columns: Vec<ColumnSpec>,
}

impl Schema {
    pub fn new(columns: Vec<ColumnSpec>) -> Result<Self, FrameError> {
        let mut seen = BTreeSet::new();
        for c in &columns {
            if c.name.is_empty() {
                return Err(FrameError::EmptyColumnName);
            }
            if !seen.insert(c.name.as_str()) {
                return Err(FrameError::DuplicateColumn(c.name.clone()));
            }
        }
        Ok(Schema { columns })
    }

    pub fn of_names<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Result<Self, FrameError> {
        Schema::new(names.into_iter().map(|n| ColumnSpec::named(n.as_ref())).collect())
    }

    pub fn columns(&self) -> &[ColumnSpec] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column_set(&self) -> ColumnSet {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }
}

/// Position of a column in the canonical display order; unknown columns sort
/// after the well-known ones, alphabetically.
pub fn canonical_rank(name: &str) -> usize {
    const ORDER: [&str; 8] = [
        col::QID,
        col::QUERY,
        col::QUERY_VEC,
        col::DOCNO,
        col::TEXT,
        col::RANK,
        col::SCORE,
        col::QANSWER,
    ];
    ORDER.iter().position(|c| *c == name).unwrap_or(ORDER.len())
}

/// Unordered set of column names, displayed in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ColumnSet(BTreeSet<String>);

impl ColumnSet {
    pub fn new() -> Self {
        ColumnSet::default()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains(name)
    }

    pub fn insert(&mut self, name: impl Into<String>) -> bool {
        self.0.insert(name.into())
    }

    pub fn remove(&mut self, name: &str) -> bool {
        self.0.remove(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset(&self, other: &ColumnSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &ColumnSet) -> ColumnSet {
        ColumnSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &ColumnSet) -> ColumnSet {
        ColumnSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &ColumnSet) -> ColumnSet {
        ColumnSet(self.0.intersection(&other.0).cloned().collect())
    }

    /// Lexicographic iteration.
    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    /// Names in canonical display order.
    pub fn ordered(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.iter().collect();
        names.sort_by_key(|n| (canonical_rank(n), *n));
        names
    }
}

impl<S: AsRef<str>> FromIterator<S> for ColumnSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        ColumnSet(iter.into_iter().map(|s| s.as_ref().to_string()).collect())
    }
}

impl fmt::Display for ColumnSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.ordered().join(", "))
    }
}

/// `cols!["qid", "query"]` builds a [`ColumnSet`].
#[macro_export]
macro_rules! cols {
    ($($name:expr),* $(,)?) => {
        {
            let names: ::std::vec::Vec<&str> = ::std::vec![$($name),*];
            $crate::frames::ColumnSet::from_iter(names)
        }
    };
}
