//! Transformers: named units that map one relation to another, each carrying
//! a declared column specification used by inspection and validation.

mod answer;
mod bm25;
mod loader;
mod rescore;
mod sdm;
pub mod wquery;

pub use answer::{extractive_answerer, first_sentence};
pub use bm25::{bm25_retriever, bm25_term_weight, idf, weighted_bm25_retriever, Bm25Params};
pub use loader::text_loader;
pub use rescore::lexical_rescorer;
pub use sdm::{rewrite_query, sdm_rewriter, SdmParams};

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::frames::{format_float, ColumnSet, FrameError, Relation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("`{transformer}` requires {required} but only {present} available")]
    MissingColumn {
        transformer: String,
        required: ColumnSet,
        present: ColumnSet,
    },
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("query `{qid}` has no tokens")]
    EmptyQuery { qid: String },
    #[error("malformed weighted query at byte {position}: {reason}")]
    MalformedWeightedQuery { position: usize, reason: String },
    #[error("{0}")]
    Failed(String),
}

impl TransformError {
    /// True for any flavour of missing-column failure.
    pub fn is_missing_column(&self) -> bool {
        matches!(
            self,
            TransformError::MissingColumn { .. } | TransformError::Frame(FrameError::MissingColumn { .. })
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid parameter `{name}`: {reason}")]
pub struct ParamError {
    pub name: String,
    pub reason: String,
}

impl ParamError {
    pub(crate) fn new(name: &str, reason: impl Into<String>) -> Self {
        ParamError {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}

/// One accepted input configuration and the columns produced from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IoRule {
    pub requires: ColumnSet,
    pub produces: ColumnSet,
}

/// Declared column behaviour of a transformer.
///
/// Rules are tried in declaration order; the first whose `requires` is a
/// subset of the given columns decides the output. With `passthrough`, input
/// columns outside the matched `requires` set are carried into the output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformerSpec {
    rules: Vec<IoRule>,
    passthrough: bool,
}

impl TransformerSpec {
    pub fn new(rules: Vec<IoRule>, passthrough: bool) -> Self {
        assert!(!rules.is_empty(), "a spec needs at least one accepted input set");
        TransformerSpec { rules, passthrough }
    }

    pub fn single(requires: ColumnSet, produces: ColumnSet, passthrough: bool) -> Self {
        TransformerSpec::new(vec![IoRule { requires, produces }], passthrough)
    }

    pub fn rules(&self) -> &[IoRule] {
        &self.rules
    }

    pub fn passthrough(&self) -> bool {
        self.passthrough
    }

    pub fn accepted_inputs(&self) -> Vec<ColumnSet> {
        self.rules.iter().map(|r| r.requires.clone()).collect()
    }

    pub fn matching_rule(&self, given: &ColumnSet) -> Option<&IoRule> {
        self.rules.iter().find(|r| r.requires.is_subset(given))
    }

    pub fn output_for(&self, given: &ColumnSet) -> Option<ColumnSet> {
        let rule = self.matching_rule(given)?;
        Some(if self.passthrough {
            rule.produces.union(&given.difference(&rule.requires))
        } else {
            rule.produces.clone()
        })
    }

    /// The rule with the fewest missing columns (first declared on ties).
    pub fn closest_rule(&self, given: &ColumnSet) -> &IoRule {
        self.rules
            .iter()
            .min_by_key(|r| r.requires.difference(given).len())
            .expect("spec has rules")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttrValue {
    Float(f64),
    Int(i64),
    Text(String),
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Float(x) => f.write_str(&format_float(*x)),
            AttrValue::Int(i) => write!(f, "{i}"),
            AttrValue::Text(s) => f.write_str(s),
        }
    }
}

/// A declared transformer setting. `default` is set for settings that can be
/// supplied as pipeline-expression keyword arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub name: String,
    pub value: AttrValue,
    pub default: Option<AttrValue>,
}

type TransformFn = dyn Fn(&Relation) -> Result<Relation, TransformError> + Send + Sync;

#[derive(Clone)]
pub struct Transformer {
    name: String,
    description: String,
    attributes: Vec<Attribute>,
    spec: Option<TransformerSpec>,
    op: Arc<TransformFn>,
}

impl Transformer {
    pub fn new<F>(name: impl Into<String>, description: impl Into<String>, spec: TransformerSpec, op: F) -> Self
    where
        F: Fn(&Relation) -> Result<Relation, TransformError> + Send + Sync + 'static,
    {
        Transformer {
            name: name.into(),
            description: description.into(),
            attributes: Vec::new(),
            spec: Some(spec),
            op: Arc::new(op),
        }
    }

    /// A transformer without a declared spec. It runs, but cannot be
    /// inspected and never validates.
    pub fn opaque<F>(name: impl Into<String>, description: impl Into<String>, op: F) -> Self
    where
        F: Fn(&Relation) -> Result<Relation, TransformError> + Send + Sync + 'static,
    {
        Transformer {
            name: name.into(),
            description: description.into(),
            attributes: Vec::new(),
            spec: None,
            op: Arc::new(op),
        }
    }

    pub fn with_attribute(mut self, name: &str, value: AttrValue, default: Option<AttrValue>) -> Self {
        self.attributes.push(Attribute {
            name: name.to_string(),
            value,
            default,
        });
        self
    }

    /// A keyword-settable attribute.
    pub fn with_param(self, name: &str, value: AttrValue, default: AttrValue) -> Self {
        self.with_attribute(name, value, Some(default))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, name: &str) -> Option<&AttrValue> {
        self.attributes.iter().find(|a| a.name == name).map(|a| &a.value)
    }

    pub fn spec(&self) -> Option<&TransformerSpec> {
        self.spec.as_ref()
    }

    /// Checks the input against the declared spec, then runs the transform.
    pub fn transform(&self, rel: &Relation) -> Result<Relation, TransformError> {
        if let Some(spec) = &self.spec {
            let given = rel.columns();
            if spec.matching_rule(&given).is_none() {
                return Err(TransformError::MissingColumn {
                    transformer: self.name.clone(),
                    required: spec.closest_rule(&given).requires.clone(),
                    present: given,
                });
            }
        }
        (self.op)(rel)
    }
}

pub fn transform(t: &Transformer, rel: &Relation) -> Result<Relation, TransformError> {
    t.transform(rel)
}

impl fmt::Debug for Transformer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Transformer")
            .field("name", &self.name)
            .field("attributes", &self.attributes)
            .field("spec", &self.spec)
            .finish_non_exhaustive()
    }
}

/// Structural identity: same name and same attribute values.
impl PartialEq for Transformer {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.attributes == other.attributes
    }
}
