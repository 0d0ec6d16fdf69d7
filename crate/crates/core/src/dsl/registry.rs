use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{linear, rr_fusion, PipelineNode, DEFAULT_RRF_K};
use crate::index::Index;
use crate::transformers::{
    bm25_retriever, extractive_answerer, lexical_rescorer, sdm_rewriter, text_loader, weighted_bm25_retriever,
    AttrValue, Bm25Params, ParamError, SdmParams, Transformer,
};

use super::{ElaborateError, Literal, PipelineExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// Accepts integer literals too.
    Float,
    Int,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamDecl {
    pub name: String,
    pub kind: ParamKind,
}

impl ParamDecl {
    pub fn new(name: &str, kind: ParamKind) -> Self {
        ParamDecl {
            name: name.to_string(),
            kind,
        }
    }
}

/// Type-checked keyword arguments handed to a factory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Args(BTreeMap<String, AttrValue>);

impl Args {
    pub fn get(&self, name: &str) -> Option<&AttrValue> {
        self.0.get(name)
    }

    pub fn f64(&self, name: &str) -> Option<f64> {
        match self.0.get(name)? {
            AttrValue::Float(x) => Some(*x),
            AttrValue::Int(i) => Some(*i as f64),
            AttrValue::Text(_) => None,
        }
    }

    pub fn i64(&self, name: &str) -> Option<i64> {
        match self.0.get(name)? {
            AttrValue::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn text(&self, name: &str) -> Option<&str> {
        match self.0.get(name)? {
            AttrValue::Text(s) => Some(s),
            _ => None,
        }
    }
}

type Factory = dyn Fn(&Args) -> Result<Transformer, ParamError> + Send + Sync;

struct Entry {
    params: Vec<ParamDecl>,
    factory: Box<Factory>,
}

/// Transformer names usable in expressions, each with its keyword parameters.
#[derive(Default)]
pub struct Registry {
    entries: BTreeMap<String, Entry>,
}

impl Registry {
    pub fn new() -> Self {
        Registry::default()
    }

    pub fn register<F>(&mut self, name: &str, params: Vec<ParamDecl>, factory: F) -> &mut Self
    where
        F: Fn(&Args) -> Result<Transformer, ParamError> + Send + Sync + 'static,
    {
        self.entries.insert(
            name.to_string(),
            Entry {
                params,
                factory: Box::new(factory),
            },
        );
        self
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn params(&self, name: &str) -> Option<&[ParamDecl]> {
        self.entries.get(name).map(|e| e.params.as_slice())
    }

    /// Builds the named transformer from literal keyword arguments.
    pub fn build(&self, name: &str, kwargs: &[(String, Literal)]) -> Result<Transformer, ElaborateError> {
        let entry = self
            .entries
            .get(name)
            .ok_or_else(|| ElaborateError::UnknownTransformer(name.to_string()))?;
        let bad = |kwarg: &str, reason: &str| ElaborateError::BadArgument {
            name: name.to_string(),
            kwarg: kwarg.to_string(),
            reason: reason.to_string(),
        };
        let mut args = BTreeMap::new();
        for (key, lit) in kwargs {
            let decl = entry
                .params
                .iter()
                .find(|p| p.name == *key)
                .ok_or_else(|| bad(key, "unknown parameter"))?;
            let value = match (decl.kind, lit) {
                (ParamKind::Float, Literal::Float(x)) => AttrValue::Float(*x),
                (ParamKind::Float, Literal::Int(i)) => AttrValue::Float(*i as f64),
                (ParamKind::Int, Literal::Int(i)) => AttrValue::Int(*i),
                (ParamKind::Text, Literal::Str(s)) => AttrValue::Text(s.clone()),
                (ParamKind::Float, _) => return Err(bad(key, "expected a number")),
                (ParamKind::Int, _) => return Err(bad(key, "expected an integer")),
                (ParamKind::Text, _) => return Err(bad(key, "expected a string")),
            };
            if args.insert(key.clone(), value).is_some() {
                return Err(bad(key, "given more than once"));
            }
        }
        (entry.factory)(&Args(args)).map_err(|e| ElaborateError::BadArgument {
            name: name.to_string(),
            kwarg: e.name,
            reason: e.reason,
        })
    }
}

fn usize_arg(args: &Args, name: &str, default: usize) -> Result<usize, ParamError> {
    match args.i64(name) {
        None => Ok(default),
        Some(i) => usize::try_from(i).map_err(|_| ParamError::new(name, "must be >= 0")),
    }
}

fn bm25_args(args: &Args) -> Result<Bm25Params, ParamError> {
    let d = Bm25Params::default();
    Ok(Bm25Params {
        k1: args.f64("k1").unwrap_or(d.k1),
        b: args.f64("b").unwrap_or(d.b),
        num_results: usize_arg(args, "num_results", d.num_results)?,
    })
}

/// The built-in vocabulary: `bm25`, `wbm25`, `sdm`, `text_loader`, `rescore`
/// and `answer`, bound to one index.
pub fn builtin_registry(index: Arc<Index>) -> Registry {
    use ParamKind::*;
    let retrieval = || {
        vec![
            ParamDecl::new("k1", Float),
            ParamDecl::new("b", Float),
            ParamDecl::new("num_results", Int),
        ]
    };
    let mut r = Registry::new();
    let idx = index.clone();
    r.register("bm25", retrieval(), move |a| bm25_retriever(idx.clone(), bm25_args(a)?));
    let idx = index.clone();
    r.register("wbm25", retrieval(), move |a| {
        weighted_bm25_retriever(idx.clone(), bm25_args(a)?)
    });
    r.register(
        "sdm",
        vec![ParamDecl::new("lambda_t", Float), ParamDecl::new("lambda_o", Float)],
        |a| {
            // one weight given: the other is its complement
            let d = SdmParams::default();
            let (t, o) = match (a.f64("lambda_t"), a.f64("lambda_o")) {
                (Some(t), Some(o)) => (t, o),
                (Some(t), None) => (t, 1.0 - t),
                (None, Some(o)) => (1.0 - o, o),
                (None, None) => (d.lambda_t, d.lambda_o),
            };
            sdm_rewriter(SdmParams {
                lambda_t: t,
                lambda_o: o,
            })
        },
    );
    r.register("text_loader", vec![], move |_| Ok(text_loader(index.clone())));
    r.register(
        "rescore",
        vec![ParamDecl::new("k1", Float), ParamDecl::new("b", Float)],
        |a| {
            let d = Bm25Params::default();
            lexical_rescorer(Bm25Params {
                k1: a.f64("k1").unwrap_or(d.k1),
                b: a.f64("b").unwrap_or(d.b),
                ..d
            })
        },
    );
    r.register("answer", vec![ParamDecl::new("max_passages", Int)], |a| {
        extractive_answerer(usize_arg(a, "max_passages", 3)?)
    });
    r
}

pub fn elaborate(expr: &PipelineExpr, registry: &Registry) -> Result<PipelineNode, ElaborateError> {
    let all = |children: &[PipelineExpr]| {
        children
            .iter()
            .map(|c| elaborate(c, registry))
            .collect::<Result<Vec<_>, _>>()
    };
    Ok(match expr {
        PipelineExpr::Leaf { name, kwargs } => PipelineNode::Leaf(registry.build(name, kwargs)?),
        PipelineExpr::Then(stages) => PipelineNode::Then(all(stages)?),
        PipelineExpr::Linear { children, weights } => linear(all(children)?, weights.clone())?,
        PipelineExpr::Rrf { children, k } => rr_fusion(all(children)?, k.unwrap_or(DEFAULT_RRF_K))?,
    })
}
