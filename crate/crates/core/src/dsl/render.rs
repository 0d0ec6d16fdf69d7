use crate::algebra::PipelineNode;
use crate::transformers::{AttrValue, Transformer};

use super::quote;

fn render_value(v: &AttrValue) -> String {
    match v {
        AttrValue::Float(x) => format!("{x:?}"),
        AttrValue::Int(i) => i.to_string(),
        AttrValue::Text(s) => quote(s),
    }
}

/// Name plus keyword arguments for settable attributes that differ from
/// their defaults.
fn render_leaf(t: &Transformer) -> String {
    let kwargs: Vec<String> = t
        .attributes()
        .iter()
        .filter(|a| matches!(&a.default, Some(d) if *d != a.value))
        .map(|a| format!("{}={}", a.name, render_value(&a.value)))
        .collect();
    if kwargs.is_empty() {
        t.name().to_string()
    } else {
        format!("{}({})", t.name(), kwargs.join(", "))
    }
}

fn render_stage(node: &PipelineNode) -> String {
    match node {
        PipelineNode::Then(_) => format!("({})", render(node)),
        _ => render(node),
    }
}

fn render_term(node: &PipelineNode) -> String {
    match node {
        PipelineNode::Then(_) | PipelineNode::Linear { .. } => format!("({})", render(node)),
        _ => render(node),
    }
}

/// Canonical expression text; parsing and elaborating it gives back an equal
/// tree.
pub fn render(node: &PipelineNode) -> String {
    match node {
        PipelineNode::Leaf(t) => render_leaf(t),
        PipelineNode::Then(stages) => stages.iter().map(render_stage).collect::<Vec<_>>().join(" >> "),
        PipelineNode::Linear { children, weights } => children
            .iter()
            .zip(weights)
            .map(|(c, w)| format!("{w:?}*{}", render_term(c)))
            .collect::<Vec<_>>()
            .join(" + "),
        PipelineNode::Rrf { children, k } => {
            let parts: Vec<String> = children.iter().map(render).collect();
            format!("rrf({}, k={k:?})", parts.join(", "))
        }
    }
}
