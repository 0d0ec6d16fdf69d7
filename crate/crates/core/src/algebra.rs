//! Pipeline operators: sequential composition, weighted linear combination
//! and reciprocal-rank fusion, plus their execution semantics.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::frames::{col, sort_and_rank, ColumnType, FrameError, Relation, Schema, Value};
use crate::inspect::{validate, ValidationDiagnostic};
use crate::transformers::{TransformError, Transformer};

pub const DEFAULT_RRF_K: f64 = 60.0;

/// Position of a node in a pipeline tree: child indices from the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct NodePath(Vec<usize>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn child(&self, i: usize) -> Self {
        let mut p = self.0.clone();
        p.push(i);
        NodePath(p)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// Dotted form, `root` for the empty path.
    pub fn dotted(&self) -> String {
        if self.0.is_empty() {
            "root".to_string()
        } else {
            self.0.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
        }
    }
}

impl From<Vec<usize>> for NodePath {
    fn from(v: Vec<usize>) -> Self {
        NodePath(v)
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dotted())
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{operator} needs at least 2 children, got {found}")]
    TooFewChildren { operator: &'static str, found: usize },
    #[error("{children} children but {weights} weights")]
    WeightLengthMismatch { children: usize, weights: usize },
    #[error("weight {0} is not finite")]
    NonFiniteWeight(f64),
    #[error("rrf k must be a finite value > 0, got {0}")]
    InvalidK(f64),
    #[error("{}", .0.message)]
    Validation(Box<ValidationDiagnostic>),
    #[error("execution failed at {path} ({node}): {source}")]
    Execution {
        path: NodePath,
        node: String,
        source: TransformError,
    },
}

impl PipelineError {
    pub fn is_missing_column(&self) -> bool {
        matches!(self, PipelineError::Execution { source, .. } if source.is_missing_column())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PipelineNode {
    Leaf(Transformer),
    Then(Vec<PipelineNode>),
    Linear {
        children: Vec<PipelineNode>,
        weights: Vec<f64>,
    },
    Rrf {
        children: Vec<PipelineNode>,
        k: f64,
    },
}

impl From<Transformer> for PipelineNode {
    fn from(t: Transformer) -> Self {
        PipelineNode::Leaf(t)
    }
}

impl PipelineNode {
    pub fn leaf(t: Transformer) -> Self {
        PipelineNode::Leaf(t)
    }

    /// `a >> b`, flattening nested sequences on both sides.
    pub fn then(self, next: impl Into<PipelineNode>) -> Self {
        then(self, next.into())
    }

    /// Operator label used in diagnostics and schematics.
    pub fn label(&self) -> &str {
        match self {
            PipelineNode::Leaf(t) => t.name(),
            PipelineNode::Then(_) => "then",
            PipelineNode::Linear { .. } => "linear",
            PipelineNode::Rrf { .. } => "rrf",
        }
    }

    pub fn children(&self) -> &[PipelineNode] {
        match self {
            PipelineNode::Leaf(_) => &[],
            PipelineNode::Then(c) => c,
            PipelineNode::Linear { children, .. } | PipelineNode::Rrf { children, .. } => children,
        }
    }

    /// Node at `path`, if it exists.
    pub fn at(&self, path: &NodePath) -> Option<&PipelineNode> {
        path.indices().iter().try_fold(self, |node, &i| node.children().get(i))
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(PipelineNode::depth).max().unwrap_or(0)
    }
}

pub fn then(a: PipelineNode, b: PipelineNode) -> PipelineNode {
    let mut stages = Vec::new();
    for n in [a, b] {
        match n {
            PipelineNode::Then(children) => stages.extend(children),
            other => stages.push(other),
        }
    }
    PipelineNode::Then(stages)
}

/// Sequential composition of two or more stages.
pub fn chain(stages: impl IntoIterator<Item = PipelineNode>) -> Result<PipelineNode, PipelineError> {
    let mut it = stages.into_iter();
    let first = it.next().ok_or(PipelineError::TooFewChildren {
        operator: "then",
        found: 0,
    })?;
    let mut count = 1;
    let node = it.fold(first, |acc, n| {
        count += 1;
        then(acc, n)
    });
    if count < 2 {
        return Err(PipelineError::TooFewChildren {
            operator: "then",
            found: count,
        });
    }
    Ok(node)
}

pub fn linear(children: Vec<PipelineNode>, weights: Vec<f64>) -> Result<PipelineNode, PipelineError> {
    if children.len() < 2 {
        return Err(PipelineError::TooFewChildren {
            operator: "linear",
            found: children.len(),
        });
    }
    if children.len() != weights.len() {
        return Err(PipelineError::WeightLengthMismatch {
            children: children.len(),
            weights: weights.len(),
        });
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
        return Err(PipelineError::NonFiniteWeight(*w));
    }
    Ok(PipelineNode::Linear { children, weights })
}

pub fn rr_fusion(children: Vec<PipelineNode>, k: f64) -> Result<PipelineNode, PipelineError> {
    if children.len() < 2 {
        return Err(PipelineError::TooFewChildren {
            operator: "rrf",
            found: children.len(),
        });
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(PipelineError::InvalidK(k));
    }
    Ok(PipelineNode::Rrf { children, k })
}

/// Validates the pipeline against the input's columns, then runs it.
pub fn execute(node: &PipelineNode, input: &Relation) -> Result<Relation, PipelineError> {
    let diag = validate(node, &input.columns());
    if !diag.ok {
        return Err(PipelineError::Validation(Box::new(diag)));
    }
    evaluate(node, input)
}

/// Runs the pipeline without the up-front validation pass.
pub fn evaluate(node: &PipelineNode, input: &Relation) -> Result<Relation, PipelineError> {
    eval_at(node, input, &NodePath::root())
}

fn eval_at(node: &PipelineNode, input: &Relation, path: &NodePath) -> Result<Relation, PipelineError> {
    match node {
        PipelineNode::Leaf(t) => t.transform(input).map_err(|source| PipelineError::Execution {
            path: path.clone(),
            node: t.name().to_string(),
            source,
        }),
        PipelineNode::Then(stages) => {
            let mut current = input.clone();
            for (i, stage) in stages.iter().enumerate() {
                current = eval_at(stage, &current, &path.child(i))?;
            }
            Ok(current)
        }
        PipelineNode::Linear { children, weights } => {
            let outputs = eval_children(children, input, path)?;
            fuse(&outputs, |i, out| {
                let w = weights[i];
                let (_, _, score) = result_columns(out)?;
                Ok(Box::new(move |row: &[Value]| w * row[score].as_f64().unwrap_or(0.0)))
            })
            .map_err(|source| fusion_error(node, path, source))
        }
        PipelineNode::Rrf { children, k } => {
            let outputs = eval_children(children, input, path)?
                .iter()
                .map(sort_and_rank)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| fusion_error(node, path, e.into()))?;
            let k = *k;
            fuse(&outputs, |_, out| {
                let rank = out.require_typed(col::RANK, ColumnType::Int64)?;
                Ok(Box::new(move |row: &[Value]| {
                    let r = row[rank].as_i64().unwrap_or(0) as f64 + 1.0;
                    1.0 / (k + r)
                }))
            })
            .map_err(|source| fusion_error(node, path, source))
        }
    }
}

fn eval_children(children: &[PipelineNode], input: &Relation, path: &NodePath) -> Result<Vec<Relation>, PipelineError> {
    children
        .iter()
        .enumerate()
        .map(|(i, c)| eval_at(c, input, &path.child(i)))
        .collect()
}

fn fusion_error(node: &PipelineNode, path: &NodePath, source: TransformError) -> PipelineError {
    PipelineError::Execution {
        path: path.clone(),
        node: node.label().to_string(),
        source,
    }
}

fn result_columns(rel: &Relation) -> Result<(usize, usize, usize), FrameError> {
    Ok((
        rel.require_text(col::QID)?,
        rel.require_text(col::DOCNO)?,
        rel.require_typed(col::SCORE, ColumnType::Float64)?,
    ))
}

type Contribution = Box<dyn Fn(&[Value]) -> f64>;

/// Union of the children's `(qid, docno)` pairs, scored by summing each
/// child's contribution. Contributions are summed in sorted order so the
/// result does not depend on child order.
fn fuse<F>(outputs: &[Relation], contribution: F) -> Result<Relation, TransformError>
where
    F: Fn(usize, &Relation) -> Result<Contribution, FrameError>,
{
    let keep_query = outputs.iter().all(|o| o.columns().contains(col::QUERY));
    let mut parts: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    let mut queries: BTreeMap<String, String> = BTreeMap::new();
    for (i, out) in outputs.iter().enumerate() {
        let (qid, docno, _) = result_columns(out)?;
        let f = contribution(i, out)?;
        let query = if keep_query { out.index_of(col::QUERY) } else { None };
        for row in out.rows() {
            let q = row[qid].as_text().unwrap_or("").to_string();
            if let Some(qc) = query {
                // first child's query text wins
                queries
                    .entry(q.clone())
                    .or_insert_with(|| row[qc].as_text().unwrap_or("").to_string());
            }
            let d = row[docno].as_text().unwrap_or("").to_string();
            parts.entry((q, d)).or_default().push(f(row));
        }
    }

    let mut names = vec![col::QID];
    if keep_query {
        names.push(col::QUERY);
    }
    names.extend([col::DOCNO, col::RANK, col::SCORE]);
    let rows = parts
        .into_iter()
        .map(|((q, d), mut contributions)| {
            contributions.sort_by(f64::total_cmp);
            let score = contributions.iter().fold(0.0, |acc, c| acc + c);
            let mut row = vec![Value::Text(q.clone())];
            if keep_query {
                row.push(Value::Text(queries.get(&q).cloned().unwrap_or_default()));
            }
            row.extend([Value::Text(d), Value::Int(0), Value::Float(score)]);
            row
        })
        .collect();
    let fused = Relation::new(Schema::of_names(names)?, rows)?;
    Ok(sort_and_rank(&fused)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cols;
    use crate::transformers::TransformerSpec;

    /// A fixed run, ignoring its input.
    fn run(name: &str, rows: &[(&str, &str, f64)]) -> PipelineNode {
        let rows: Vec<(String, String, f64)> = rows
            .iter()
            .map(|(q, d, s)| (q.to_string(), d.to_string(), *s))
            .collect();
        PipelineNode::Leaf(Transformer::new(
            name,
            "fixed run",
            TransformerSpec::single(cols!["qid"], cols!["qid", "docno", "score", "rank"], false),
            move |_| {
                let schema = Schema::of_names(["qid", "docno", "score"])?;
                let rel = Relation::new(
                    schema,
                    rows.iter()
                        .map(|(q, d, s)| vec![Value::Text(q.clone()), Value::Text(d.clone()), Value::Float(*s)])
                        .collect(),
                )?;
                Ok(sort_and_rank(&rel)?)
            },
        ))
    }

    fn scored(rel: &Relation) -> Vec<(String, i64, f64)> {
        let (d, r, s) = (
            rel.index_of("docno").unwrap(),
            rel.index_of("rank").unwrap(),
            rel.index_of("score").unwrap(),
        );
        rel.rows()
            .iter()
            .map(|row| (row[d].to_string(), row[r].as_i64().unwrap(), row[s].as_f64().unwrap()))
            .collect()
    }

    fn input() -> Relation {
        Relation::from_queries([("q1", "x")])
    }

    #[test]
    fn then_flattens() {
        let a = run("a", &[]);
        let b = run("b", &[]);
        let c = run("c", &[]);
        let t = then(then(a.clone(), b.clone()), c.clone());
        assert_eq!(t, PipelineNode::Then(vec![a.clone(), b.clone(), c.clone()]));
        let t = then(a.clone(), then(b.clone(), c.clone()));
        assert_eq!(t, PipelineNode::Then(vec![a, b, c]));
    }

    #[test]
    fn linear_union_with_zero_fill() {
        let a = run("a", &[("q1", "d1", 2.0)]);
        let b = run("b", &[("q1", "d2", 3.0)]);
        let out = evaluate(&linear(vec![a.clone(), b.clone()], vec![1.0, 1.0]).unwrap(), &input()).unwrap();
        assert_eq!(scored(&out), vec![("d2".into(), 0, 3.0), ("d1".into(), 1, 2.0)]);

        let out = evaluate(&linear(vec![a, b], vec![1.0, 0.0]).unwrap(), &input()).unwrap();
        assert_eq!(scored(&out), vec![("d1".into(), 0, 2.0), ("d2".into(), 1, 0.0)]);
    }

    #[test]
    fn linear_self_combination_doubles() {
        let a = run("a", &[("q1", "d1", 2.0), ("q1", "d2", 0.5)]);
        let out = evaluate(&linear(vec![a.clone(), a], vec![1.0, 1.0]).unwrap(), &input()).unwrap();
        assert_eq!(scored(&out), vec![("d1".into(), 0, 4.0), ("d2".into(), 1, 1.0)]);
    }

    #[test]
    fn rrf_hand_example() {
        let r1 = run("r1", &[("q1", "dA", 2.0), ("q1", "dB", 1.0)]);
        let r2 = run("r2", &[("q1", "dB", 9.0), ("q1", "dC", 8.0)]);
        let out = evaluate(&rr_fusion(vec![r1, r2], 60.0).unwrap(), &input()).unwrap();
        assert_eq!(
            scored(&out),
            vec![
                ("dB".into(), 0, 1.0 / 62.0 + 1.0 / 61.0),
                ("dA".into(), 1, 1.0 / 61.0),
                ("dC".into(), 2, 1.0 / 62.0)
            ]
        );
        assert_eq!(out.columns(), cols!["qid", "docno", "rank", "score"]);
    }

    #[test]
    fn constructor_errors() {
        let a = run("a", &[]);
        assert!(matches!(
            linear(vec![a.clone(), a.clone()], vec![1.0]),
            Err(PipelineError::WeightLengthMismatch {
                children: 2,
                weights: 1
            })
        ));
        assert!(matches!(
            linear(vec![a.clone()], vec![1.0]),
            Err(PipelineError::TooFewChildren { .. })
        ));
        assert!(matches!(
            linear(vec![a.clone(), a.clone()], vec![1.0, f64::NAN]),
            Err(PipelineError::NonFiniteWeight(_))
        ));
        assert!(matches!(
            rr_fusion(vec![a.clone(), a.clone()], 0.0),
            Err(PipelineError::InvalidK(_))
        ));
        assert!(matches!(
            chain([a]),
            Err(PipelineError::TooFewChildren { found: 1, .. })
        ));
    }

    #[test]
    fn paths_display() {
        assert_eq!(NodePath::root().to_string(), "root");
        assert_eq!(NodePath::from(vec![0, 1, 2]).to_string(), "0.1.2");
    }

    #[test]
    fn execution_errors_carry_path() {
        let failing = PipelineNode::Leaf(Transformer::new(
            "boom",
            "",
            TransformerSpec::single(cols!["qid"], cols!["qid"], true),
            |_| Err(TransformError::Failed("boom".into())),
        ));
        let p = then(run("a", &[]), failing);
        match evaluate(&p, &input()) {
            Err(PipelineError::Execution { path, node, .. }) => {
                assert_eq!(path, NodePath::from(vec![1]));
                assert_eq!(node, "boom");
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
