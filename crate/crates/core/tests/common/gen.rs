//! Seeded random pipelines and relations.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use flowrank::algebra::{linear, rr_fusion, PipelineNode};
use flowrank::cols;
use flowrank::dsl::{Literal, Registry};
use flowrank::frames::{col, sort_and_rank, ColumnSet, ColumnSpec, ColumnType, Relation, Schema, Value};
use flowrank::transformers::{Transformer, TransformerSpec};

pub const VOCAB: [&str; 10] = [
    "the", "quick", "brown", "fox", "lazy", "dog", "barks", "jumps", "over", "cat",
];
pub const DOCNOS: [&str; 5] = ["d1", "d2", "d3", "d4", "d5"];

fn float_arg<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Literal {
    Literal::Float(rng.gen_range(lo..hi))
}

/// A built-in transformer, sometimes with non-default keyword arguments.
pub fn builtin_leaf<R: Rng>(rng: &mut R, registry: &Registry) -> PipelineNode {
    let name = *["bm25", "wbm25", "sdm", "text_loader", "rescore", "answer"]
        .choose(rng)
        .unwrap();
    let mut kwargs = Vec::new();
    if rng.gen_bool(0.5) {
        match name {
            "bm25" | "wbm25" => {
                kwargs.push(("k1".to_string(), float_arg(rng, 0.0, 3.0)));
                kwargs.push(("b".to_string(), float_arg(rng, 0.0, 1.0)));
                kwargs.push(("num_results".to_string(), Literal::Int(rng.gen_range(1..50))));
            }
            "sdm" => {
                let t: f64 = rng.gen_range(0.0..1.0);
                kwargs.push(("lambda_t".to_string(), Literal::Float(t)));
                kwargs.push(("lambda_o".to_string(), Literal::Float(1.0 - t)));
            }
            "rescore" => kwargs.push(("k1".to_string(), float_arg(rng, 0.0, 3.0))),
            "answer" => kwargs.push(("max_passages".to_string(), Literal::Int(rng.gen_range(1..6)))),
            _ => {}
        }
    }
    PipelineNode::Leaf(registry.build(name, &kwargs).expect("valid generated arguments"))
}

/// Random tree of at most `depth` levels; `leaf` makes the leaves.
pub fn random_tree<R: Rng>(rng: &mut R, depth: usize, leaf: &mut dyn FnMut(&mut R) -> PipelineNode) -> PipelineNode {
    if depth <= 1 || rng.gen_bool(0.3) {
        return leaf(rng);
    }
    let n = rng.gen_range(2..=3);
    let children: Vec<PipelineNode> = (0..n).map(|_| random_tree(rng, depth - 1, leaf)).collect();
    match rng.gen_range(0..4) {
        0 | 1 => PipelineNode::Then(children),
        2 => {
            let weights = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            linear(children, weights).unwrap()
        }
        _ => {
            let k = if rng.gen_bool(0.5) {
                60.0
            } else {
                rng.gen_range(0.5..100.0)
            };
            rr_fusion(children, k).unwrap()
        }
    }
}

fn words<R: Rng>(rng: &mut R, lo: usize, hi: usize) -> String {
    let n = rng.gen_range(lo..=hi);
    (0..n)
        .map(|_| *VOCAB.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

fn random_value<R: Rng>(rng: &mut R, name: &str, ctype: ColumnType) -> Value {
    match ctype {
        ColumnType::Float64 => Value::Float(rng.gen_range(-5.0..5.0)),
        ColumnType::Int64 => Value::Int(rng.gen_range(0..10)),
        ColumnType::FloatVector => Value::Vector((0..4).map(|_| rng.gen_range(-1.0..1.0)).collect()),
        ColumnType::Text => Value::Text(match name {
            "qid" => format!("q{}", rng.gen_range(1..=3)),
            "query" => words(rng, 1, 3),
            "docno" => DOCNOS.choose(rng).unwrap().to_string(),
            "text" => words(rng, 0, 6),
            _ => words(rng, 1, 1),
        }),
    }
}

/// Rows with exactly `columns`, typed by column name.
pub fn random_relation<R: Rng>(rng: &mut R, columns: &ColumnSet) -> Relation {
    let schema = Schema::of_names(columns.ordered()).unwrap();
    let n = rng.gen_range(0..=6);
    let rows = (0..n)
        .map(|_| {
            schema
                .columns()
                .iter()
                .map(|c| random_value(rng, &c.name, c.ctype))
                .collect()
        })
        .collect();
    Relation::new(schema, rows).unwrap()
}

/// Three transformers known only by their declared specs.
pub fn synthetic() -> Vec<Transformer> {
    let encode = Transformer::new(
        "encode_query",
        "Embeds each query as a small vector.",
        TransformerSpec::single(cols!["qid", "query"], cols!["qid", "query", "query_vec"], true),
        |rel: &Relation| {
            let q = rel.require_text(col::QUERY)?;
            let vecs = (0..rel.len())
                .map(|i| {
                    let text = rel.text_at(i, q);
                    Value::Vector(
                        VOCAB[..4]
                            .iter()
                            .map(|w| text.split_whitespace().filter(|t| t == w).count() as f64)
                            .collect(),
                    )
                })
                .collect();
            Ok(rel.with_column(ColumnSpec::named(col::QUERY_VEC), vecs)?)
        },
    );
    let dense = Transformer::new(
        "dense",
        "Scores every document against the query vector.",
        TransformerSpec::single(cols!["qid", "query_vec"], cols!["qid", "docno", "score", "rank"], false),
        |rel: &Relation| {
            let q = rel.require_text(col::QID)?;
            let v = rel.require_typed(col::QUERY_VEC, ColumnType::FloatVector)?;
            let mut per_qid: BTreeMap<String, f64> = BTreeMap::new();
            for (i, row) in rel.rows().iter().enumerate() {
                let Value::Vector(xs) = &row[v] else { continue };
                per_qid.insert(rel.text_at(i, q).to_string(), xs.iter().sum());
            }
            let rows = per_qid
                .iter()
                .flat_map(|(qid, norm)| {
                    DOCNOS.iter().enumerate().map(move |(j, d)| {
                        vec![
                            Value::Text(qid.clone()),
                            Value::Text(d.to_string()),
                            Value::Float(norm / (j as f64 + 1.0)),
                            Value::Int(0),
                        ]
                    })
                })
                .collect();
            let schema = Schema::of_names([col::QID, col::DOCNO, col::SCORE, col::RANK])?;
            Ok(sort_and_rank(&Relation::new(schema, rows)?)?)
        },
    );
    let tag = Transformer::new(
        "doc_tag",
        "Attaches a label to each document.",
        TransformerSpec::single(cols!["docno"], cols!["docno", "tag"], true),
        |rel: &Relation| {
            let d = rel.require_text(col::DOCNO)?;
            let tags = (0..rel.len())
                .map(|i| Value::Text(format!("tag-{}", rel.text_at(i, d))))
                .collect();
            Ok(rel.with_column(ColumnSpec::named("tag"), tags)?)
        },
    );
    vec![encode, dense, tag]
}

/// Input column sets to draw random inputs from.
pub fn input_sets() -> Vec<ColumnSet> {
    vec![
        cols!["qid", "query"],
        cols!["qid", "query"],
        cols!["qid", "query", "query_vec"],
        cols!["qid", "docno"],
        cols!["qid", "query", "docno", "score", "rank"],
        cols!["qid", "query", "docno", "text", "score", "rank"],
    ]
}
