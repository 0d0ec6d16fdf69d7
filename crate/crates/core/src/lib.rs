//! Declarative retrieval pipelines over typed relational frames.
//!
//! Transformers declare which columns they accept and produce, so a pipeline
//! can be inspected, validated, drawn as a schematic, and served as a tool
//! before any data flows through it.

pub mod algebra;
pub mod dsl;
pub mod frames;
pub mod index;
pub mod inspect;
pub mod mcp;
pub mod schematic;
pub mod transformers;

pub use algebra::{execute, PipelineNode};
pub use frames::{ColumnSet, Relation};
pub use index::Index;
pub use transformers::Transformer;
