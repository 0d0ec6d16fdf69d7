use std::fmt;

use super::{col, ColumnSet, Schema};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseKind {
    Query,
    Document,
    Result,
    Answer,
}

impl BaseKind {
    /// In precedence order: R > A > Q > D.
    pub const PRECEDENCE: [BaseKind; 4] = [BaseKind::Result, BaseKind::Answer, BaseKind::Query, BaseKind::Document];

    pub fn abbr(self) -> &'static str {
        match self {
            BaseKind::Query => "Q",
            BaseKind::Document => "D",
            BaseKind::Result => "R",
            BaseKind::Answer => "A",
        }
    }

    pub fn required(self) -> &'static [&'static str] {
        match self {
            BaseKind::Query => &[col::QID, col::QUERY],
            BaseKind::Document => &[col::DOCNO, col::TEXT],
            BaseKind::Result => &[col::QID, col::DOCNO, col::SCORE, col::RANK],
            BaseKind::Answer => &[col::QID, col::QANSWER],
        }
    }

    /// Columns that may accompany the required ones without making the frame
    /// extended. Result frames carry the query text along.
    fn permitted(self) -> &'static [&'static str] {
        match self {
            BaseKind::Result => &[col::QUERY],
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameKind {
    Base(BaseKind),
    Extended(Option<BaseKind>),
}

impl FrameKind {
    pub fn base(self) -> Option<BaseKind> {
        match self {
            FrameKind::Base(b) => Some(b),
            FrameKind::Extended(b) => b,
        }
    }

    /// Badge text: `Q`, `R+`, ... and `?` when nothing matches.
    pub fn abbr(self) -> String {
        match self {
            FrameKind::Base(b) => b.abbr().to_string(),
            FrameKind::Extended(Some(b)) => format!("{}+", b.abbr()),
            FrameKind::Extended(None) => "?".to_string(),
        }
    }
}

impl fmt::Display for FrameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.abbr())
    }
}

pub fn classify_frame(schema: &Schema) -> FrameKind {
    classify_columns(&schema.column_set())
}

/// Most specific frame kind whose required columns are all present.
pub fn classify_columns(columns: &ColumnSet) -> FrameKind {
    let Some(base) = BaseKind::PRECEDENCE
        .into_iter()
        .find(|k| k.required().iter().all(|c| columns.contains(c)))
    else {
        return FrameKind::Extended(None);
    };
    let extra = columns
        .iter()
        .any(|c| !base.required().contains(&c) && !base.permitted().contains(&c));
    if extra {
        FrameKind::Extended(Some(base))
    } else {
        FrameKind::Base(base)
    }
}
