//! Static inspection of transformers and pipelines: accepted inputs, produced
//! outputs, attributes, subtransformers, and validation of column flow.
//!
//! Nothing here runs a transform; everything is derived from declared specs.

use thiserror::Error;

use crate::algebra::{NodePath, PipelineNode};
use crate::cols;
use crate::frames::{col, ColumnSet};
use crate::transformers::Transformer;

/// Columns every fusion child must produce.
pub fn fusion_input() -> ColumnSet {
    cols![col::QID, col::DOCNO, col::SCORE]
}

/// Columns produced by a fusion node, before the optional `query`.
pub fn fusion_output() -> ColumnSet {
    cols![col::QID, col::DOCNO, col::SCORE, col::RANK]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationDiagnostic {
    pub ok: bool,
    pub failing_path: Option<NodePath>,
    pub node: Option<String>,
    pub missing: ColumnSet,
    pub available: ColumnSet,
    pub message: String,
}

impl ValidationDiagnostic {
    fn ok() -> Self {
        ValidationDiagnostic {
            ok: true,
            failing_path: None,
            node: None,
            missing: ColumnSet::new(),
            available: ColumnSet::new(),
            message: "ok".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InspectError {
    #[error("transformer `{name}` at {path} has no declared column spec")]
    Uninspectable { path: NodePath, name: String },
    #[error("{}", .0.message)]
    NotSatisfied(Box<ValidationDiagnostic>),
}

/// Accepted input sets and the output produced for each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IoReport {
    pub accepted_inputs: Vec<ColumnSet>,
    pub outputs_for: Vec<(ColumnSet, ColumnSet)>,
}

impl IoReport {
    pub fn output_for(&self, accepted: &ColumnSet) -> Option<&ColumnSet> {
        self.outputs_for.iter().find(|(a, _)| a == accepted).map(|(_, o)| o)
    }
}

struct Failure {
    path: NodePath,
    node: String,
    required: Option<ColumnSet>,
    available: ColumnSet,
}

impl Failure {
    fn into_diagnostic(self) -> ValidationDiagnostic {
        let (missing, message) = match &self.required {
            Some(required) => (
                required.difference(&self.available),
                format!(
                    "invalid pipeline at {}: {} requires {} but only {} available",
                    self.path, self.node, required, self.available
                ),
            ),
            None => (
                ColumnSet::new(),
                format!(
                    "invalid pipeline at {}: {} has no declared column spec",
                    self.path, self.node
                ),
            ),
        };
        ValidationDiagnostic {
            ok: false,
            failing_path: Some(self.path),
            node: Some(self.node),
            missing,
            available: self.available,
            message,
        }
    }
}

fn propagate(node: &PipelineNode, given: &ColumnSet, path: &NodePath) -> Result<ColumnSet, Failure> {
    match node {
        PipelineNode::Leaf(t) => {
            let Some(spec) = t.spec() else {
                return Err(Failure {
                    path: path.clone(),
                    node: t.name().to_string(),
                    required: None,
                    available: given.clone(),
                });
            };
            spec.output_for(given).ok_or_else(|| Failure {
                path: path.clone(),
                node: t.name().to_string(),
                required: Some(spec.closest_rule(given).requires.clone()),
                available: given.clone(),
            })
        }
        PipelineNode::Then(stages) => stages
            .iter()
            .enumerate()
            .try_fold(given.clone(), |cols, (i, s)| propagate(s, &cols, &path.child(i))),
        PipelineNode::Linear { children, .. } | PipelineNode::Rrf { children, .. } => {
            let mut keep_query = true;
            for (i, child) in children.iter().enumerate() {
                let out = propagate(child, given, &path.child(i))?;
                if !fusion_input().is_subset(&out) {
                    return Err(Failure {
                        path: path.clone(),
                        node: node.label().to_string(),
                        required: Some(fusion_input()),
                        available: out,
                    });
                }
                keep_query &= out.contains(col::QUERY);
            }
            let mut out = fusion_output();
            if keep_query {
                out.insert(col::QUERY);
            }
            Ok(out)
        }
    }
}

/// Propagates `given` through the tree and reports the first stage whose
/// requirement is not met (leftmost, outermost first).
pub fn validate(node: &PipelineNode, given: &ColumnSet) -> ValidationDiagnostic {
    match propagate(node, given, &NodePath::root()) {
        Ok(_) => ValidationDiagnostic::ok(),
        Err(f) => f.into_diagnostic(),
    }
}

pub fn output_columns(node: &PipelineNode, given: &ColumnSet) -> Result<ColumnSet, InspectError> {
    propagate(node, given, &NodePath::root()).map_err(|f| InspectError::NotSatisfied(Box::new(f.into_diagnostic())))
}

fn check_inspectable(node: &PipelineNode) -> Result<(), InspectError> {
    for (path, t) in subtransformers(node) {
        if t.spec().is_none() {
            return Err(InspectError::Uninspectable {
                path,
                name: t.name().to_string(),
            });
        }
    }
    Ok(())
}

const MAX_CANDIDATES: usize = 64;

fn candidates(node: &PipelineNode) -> Vec<ColumnSet> {
    match node {
        PipelineNode::Leaf(t) => t.spec().map(|s| s.accepted_inputs()).unwrap_or_default(),
        PipelineNode::Then(stages) => stages.first().map(candidates).unwrap_or_default(),
        PipelineNode::Linear { children, .. } | PipelineNode::Rrf { children, .. } => {
            children.iter().fold(vec![ColumnSet::new()], |acc, child| {
                let mut next = Vec::new();
                for a in &acc {
                    for c in candidates(child) {
                        let u = a.union(&c);
                        if !next.contains(&u) && next.len() < MAX_CANDIDATES {
                            next.push(u);
                        }
                    }
                }
                next
            })
        }
    }
}

/// Column sets accepted by the whole pipeline.
///
/// Starts from the head's accepted sets and, when a later stage is missing a
/// column that earlier stages would carry through, adds it to the candidate.
pub fn input_columns(node: &PipelineNode) -> Result<Vec<ColumnSet>, InspectError> {
    check_inspectable(node)?;
    let mut accepted: Vec<ColumnSet> = Vec::new();
    for mut cand in candidates(node) {
        loop {
            let diag = validate(node, &cand);
            if diag.ok {
                if !accepted.contains(&cand) {
                    accepted.push(cand);
                }
                break;
            }
            let grown = cand.union(&diag.missing);
            if grown == cand {
                break;
            }
            cand = grown;
        }
    }
    let minimal = accepted
        .iter()
        .filter(|a| !accepted.iter().any(|b| b != *a && b.is_subset(a)))
        .cloned()
        .collect();
    Ok(minimal)
}

pub fn io_report(node: &PipelineNode) -> Result<IoReport, InspectError> {
    let accepted_inputs = input_columns(node)?;
    let outputs_for = accepted_inputs
        .iter()
        .map(|a| output_columns(node, a).map(|o| (a.clone(), o)))
        .collect::<Result<_, _>>()?;
    Ok(IoReport {
        accepted_inputs,
        outputs_for,
    })
}

/// Leaves in preorder, with their tree paths.
pub fn subtransformers(node: &PipelineNode) -> Vec<(NodePath, &Transformer)> {
    fn walk<'a>(node: &'a PipelineNode, path: NodePath, out: &mut Vec<(NodePath, &'a Transformer)>) {
        match node {
            PipelineNode::Leaf(t) => out.push((path, t)),
            _ => {
                for (i, c) in node.children().iter().enumerate() {
                    walk(c, path.child(i), out);
                }
            }
        }
    }
    let mut out = Vec::new();
    walk(node, NodePath::root(), &mut out);
    out
}

/// Declared attributes with canonically rendered values.
pub fn attributes(t: &Transformer) -> Vec<(String, String)> {
    t.attributes()
        .iter()
        .map(|a| (a.name.clone(), a.value.to_string()))
        .collect()
}
