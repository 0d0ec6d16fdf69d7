//! Pipeline diagrams: transformer boxes joined by frame badges, with fusion
//! operators drawn as forks. Rendered as self-contained HTML or plain text.

mod html;
mod text;

pub use html::render_html;
pub use text::render_text;

use thiserror::Error;

use crate::algebra::{NodePath, PipelineNode};
use crate::frames::{classify_columns, ColumnSet, FrameKind};
use crate::inspect::{self, InspectError};
use crate::transformers::Transformer;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameBadge {
    pub kind: FrameKind,
    pub columns: ColumnSet,
}

impl FrameBadge {
    pub fn new(columns: ColumnSet) -> Self {
        FrameBadge {
            kind: classify_columns(&columns),
            columns,
        }
    }

    pub fn abbr(&self) -> String {
        self.kind.abbr()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxStage {
    pub path: NodePath,
    pub name: String,
    pub attributes: Vec<(String, String)>,
    pub tooltip: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fork {
    pub path: NodePath,
    /// `rrf` or `linear`.
    pub operator: String,
    /// Operator with its parameters, e.g. `rrf k=60`.
    pub label: String,
    /// Each lane starts from the badge in front of the fork.
    pub lanes: Vec<Chain>,
    pub tooltip: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stage {
    Box(BoxStage),
    Fork(Fork),
}

/// Stages in flow order, each followed by the badge of what it emits.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Chain {
    pub steps: Vec<(Stage, FrameBadge)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchematicGraph {
    pub entry: FrameBadge,
    pub chain: Chain,
}

impl SchematicGraph {
    /// Transformer boxes in flow order, lanes top to bottom.
    pub fn boxes(&self) -> Vec<&BoxStage> {
        fn walk<'a>(chain: &'a Chain, out: &mut Vec<&'a BoxStage>) {
            for (stage, _) in &chain.steps {
                match stage {
                    Stage::Box(b) => out.push(b),
                    Stage::Fork(f) => f.lanes.iter().for_each(|l| walk(l, out)),
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.chain, &mut out);
        out
    }

    /// Badges along the main line, entry first.
    pub fn main_badges(&self) -> Vec<&FrameBadge> {
        std::iter::once(&self.entry)
            .chain(self.chain.steps.iter().map(|(_, b)| b))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchematicError {
    #[error(transparent)]
    Inspect(#[from] InspectError),
}

fn leaf_tooltip(t: &Transformer, input: &ColumnSet, output: &ColumnSet) -> String {
    let mut lines = vec![t.name().to_string()];
    if !t.description().is_empty() {
        lines.push(t.description().to_string());
    }
    for (k, v) in inspect::attributes(t) {
        lines.push(format!("{k} = {v}"));
    }
    lines.push(format!("input: {input}"));
    lines.push(format!("output: {output}"));
    lines.join("\n")
}

fn format_weight(w: f64) -> String {
    format!("{w}")
}

fn add_stages(
    node: &PipelineNode,
    path: &NodePath,
    input: &ColumnSet,
    chain: &mut Chain,
) -> Result<ColumnSet, InspectError> {
    let output = inspect::output_columns(node, input)?;
    let stage = match node {
        PipelineNode::Then(stages) => {
            let mut cols = input.clone();
            for (i, s) in stages.iter().enumerate() {
                cols = add_stages(s, &path.child(i), &cols, chain)?;
            }
            return Ok(cols);
        }
        PipelineNode::Leaf(t) => Stage::Box(BoxStage {
            path: path.clone(),
            name: t.name().to_string(),
            attributes: inspect::attributes(t),
            tooltip: leaf_tooltip(t, input, &output),
        }),
        PipelineNode::Linear { children, .. } | PipelineNode::Rrf { children, .. } => {
            let mut lanes = Vec::new();
            for (i, child) in children.iter().enumerate() {
                let mut lane = Chain::default();
                add_stages(child, &path.child(i), input, &mut lane)?;
                lanes.push(lane);
            }
            let (operator, label) = match node {
                PipelineNode::Rrf { k, .. } => ("rrf", format!("rrf k={k}")),
                PipelineNode::Linear { weights, .. } => (
                    "linear",
                    format!(
                        "linear weights={}",
                        weights.iter().map(|w| format_weight(*w)).collect::<Vec<_>>().join(",")
                    ),
                ),
                _ => unreachable!("fusion node"),
            };
            Stage::Fork(Fork {
                path: path.clone(),
                operator: operator.to_string(),
                tooltip: format!("{label}\ninput: {input}\noutput: {output}"),
                label,
                lanes,
            })
        }
    };
    chain.steps.push((stage, FrameBadge::new(output.clone())));
    Ok(output)
}

/// Lays out a valid pipeline for the given input columns.
pub fn build_schematic(node: &PipelineNode, given: &ColumnSet) -> Result<SchematicGraph, SchematicError> {
    let diag = inspect::validate(node, given);
    if !diag.ok {
        return Err(InspectError::NotSatisfied(Box::new(diag)).into());
    }
    let mut chain = Chain::default();
    add_stages(node, &NodePath::root(), given, &mut chain)?;
    Ok(SchematicGraph {
        entry: FrameBadge::new(given.clone()),
        chain,
    })
}
