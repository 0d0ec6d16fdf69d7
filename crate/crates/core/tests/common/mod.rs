#![allow(dead_code)]

pub mod bm25;
pub mod fusion;
pub mod gen;

use std::path::Path;
use std::sync::Arc;

use flowrank::dsl::{builtin_registry, compile, Registry};
use flowrank::{Index, PipelineNode, Relation};

pub const FIG1: &str = "rrf(bm25, sdm >> wbm25) >> text_loader >> rescore >> answer";

pub const TOY5: [(&str, &str); 5] = [
    ("d1", "the quick brown fox"),
    ("d2", "the lazy dog"),
    ("d3", "quick quick fox"),
    ("d4", "brown dog barks"),
    ("d5", "fox jumps over the lazy dog"),
];

/// Relative to the crate root, which is the working directory of tests.
pub const TOY5_INDEX: &str = "tests/fixtures/toy5";

pub fn toy5_index() -> Arc<Index> {
    Arc::new(Index::load(Path::new(TOY5_INDEX)).expect("committed toy5 index loads"))
}

pub fn registry() -> Registry {
    builtin_registry(toy5_index())
}

pub fn pipeline(src: &str) -> PipelineNode {
    compile(src, &registry()).expect("pipeline compiles")
}

pub fn two_queries() -> Relation {
    Relation::from_queries([("q1", "quick fox"), ("q2", "lazy dog")])
}
