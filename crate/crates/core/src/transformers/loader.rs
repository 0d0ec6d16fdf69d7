use std::sync::Arc;

use crate::cols;
use crate::frames::join_on_docno;
use crate::index::Index;

use super::{AttrValue, Transformer, TransformerSpec};

/// Adds each row's document text from the index's stored texts.
pub fn text_loader(index: Arc<Index>) -> Transformer {
    let location = index
        .location()
        .map_or_else(|| "<memory>".to_string(), |p| p.display().to_string());
    Transformer::new(
        "text_loader",
        "Loads the stored text of each retrieved document into a `text` column.",
        TransformerSpec::single(cols!["docno"], cols!["docno", "text"], true),
        move |rel| Ok(join_on_docno(rel, index.as_ref())?),
    )
    .with_attribute("index", AttrValue::Text(location), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{col, FrameError, Relation, Schema, Value};
    use crate::transformers::TransformError;

    fn index() -> Arc<Index> {
        Arc::new(Index::build([("d1", "the quick brown fox"), ("d2", "the lazy dog")]).unwrap())
    }

    fn results(docnos: &[&str]) -> Relation {
        let schema = Schema::of_names(["qid", "docno", "score", "rank"]).unwrap();
        let rows = docnos
            .iter()
            .enumerate()
            .map(|(i, d)| {
                vec![
                    Value::Text("q1".into()),
                    Value::Text(d.to_string()),
                    Value::Float(1.0 / (i + 1) as f64),
                    Value::Int(i as i64),
                ]
            })
            .collect();
        Relation::new(schema, rows).unwrap()
    }

    #[test]
    fn loads_text() {
        let out = text_loader(index()).transform(&results(&["d1"])).unwrap();
        let t = out.index_of(col::TEXT).unwrap();
        assert_eq!(out.rows()[0][t], Value::Text("the quick brown fox".into()));
        assert_eq!(out.columns(), cols!["qid", "docno", "score", "rank", "text"]);
    }

    #[test]
    fn empty_and_unknown() {
        let out = text_loader(index()).transform(&results(&[])).unwrap();
        assert!(out.is_empty() && out.columns().contains("text"));
        assert_eq!(
            text_loader(index()).transform(&results(&["d9"])),
            Err(TransformError::Frame(FrameError::UnknownDocno("d9".into())))
        );
    }

    #[test]
    fn attribute_names_index() {
        assert_eq!(
            text_loader(index()).attribute("index"),
            Some(&AttrValue::Text("<memory>".into()))
        );
    }
}
