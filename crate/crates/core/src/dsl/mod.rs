//! Textual pipeline expressions.
//!
//! ```text
//! pipeline := seq ;
//! seq      := sum ( ">>" sum )* ;
//! sum      := term ( "+" term )* ;
//! term     := ( FLOAT "*" )? atom ;
//! atom     := "rrf" "(" pipeline ( "," pipeline )+ ( "," "k" "=" FLOAT )? ")"
//!           | IDENT ( "(" kwargs? ")" )?
//!           | "(" pipeline ")" ;
//! kwargs   := IDENT "=" value ( "," IDENT "=" value )* ;
//! value    := FLOAT | INT | STRING ;
//! ```
//!
//! `+` binds tighter than `>>`, so `a >> b + c` is `a >> (b + c)`. Unweighted
//! terms of a sum have weight 1.

mod parser;
mod registry;
mod render;

pub use parser::parse;
pub use registry::{builtin_registry, elaborate, Args, ParamDecl, ParamKind, Registry};
pub use render::render;

use std::fmt;

use thiserror::Error;

use crate::algebra::{PipelineError, PipelineNode};

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Float(f64),
    Int(i64),
    Str(String),
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Float(x) => write!(f, "{x:?}"),
            Literal::Int(i) => write!(f, "{i}"),
            Literal::Str(s) => write!(f, "{}", quote(s)),
        }
    }
}

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Syntax tree of a pipeline expression. Parentheses leave no trace.
#[derive(Debug, Clone, PartialEq)]
pub enum PipelineExpr {
    Leaf {
        name: String,
        kwargs: Vec<(String, Literal)>,
    },
    Then(Vec<PipelineExpr>),
    /// A sum, or a single explicitly weighted term.
    Linear {
        children: Vec<PipelineExpr>,
        weights: Vec<f64>,
    },
    Rrf {
        children: Vec<PipelineExpr>,
        k: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {line}:{column}: expected {}, found {found}", expected_list(.expected))]
pub struct ParseError {
    /// 1-based.
    pub line: usize,
    /// 1-based, in characters.
    pub column: usize,
    /// Byte offset into the source.
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

fn expected_list(items: &[String]) -> String {
    match items {
        [] => "nothing".to_string(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} or {}", init.join(", "), last),
    }
}

#[derive(Debug, Error)]
pub enum ElaborateError {
    #[error("unknown transformer `{0}`")]
    UnknownTransformer(String),
    #[error("bad argument `{kwarg}` for `{name}`: {reason}")]
    BadArgument {
        name: String,
        kwarg: String,
        reason: String,
    },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

#[derive(Debug, Error)]
pub enum DslError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Elaborate(#[from] ElaborateError),
}

/// Parses and elaborates in one step.
pub fn compile(src: &str, registry: &Registry) -> Result<PipelineNode, DslError> {
    Ok(elaborate(&parse(src)?, registry)?)
}
