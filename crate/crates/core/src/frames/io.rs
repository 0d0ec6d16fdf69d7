use std::collections::HashSet;
use std::fmt::Write as _;

use serde_json::{Map, Number, Value as Json};

use super::{col, ColumnType, FrameError, Relation, Value};

/// Canonical float rendering: six decimals.
pub fn format_float(x: f64) -> String {
    format!("{x:.6}")
}

/// Parses `qid<TAB>query` lines into a query frame. Blank lines are skipped.
pub fn parse_topics(input: &str) -> Result<Relation, FrameError> {
    let input = input.strip_prefix('\u{feff}').unwrap_or(input);
    let mut seen = HashSet::new();
    let mut queries = Vec::new();
    for (i, line) in input.split('\n').enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let (qid, query) = line.split_once('\t').ok_or_else(|| FrameError::Topics {
            line: i + 1,
            reason: "expected `qid<TAB>query`".into(),
        })?;
        if qid.is_empty() {
            return Err(FrameError::Topics {
                line: i + 1,
                reason: "empty qid".into(),
            });
        }
        if !seen.insert(qid.to_string()) {
            return Err(FrameError::Topics {
                line: i + 1,
                reason: format!("duplicate qid `{qid}`"),
            });
        }
        queries.push((qid.to_string(), query.to_string()));
    }
    Ok(Relation::from_queries(queries))
}

/// Renders `qid Q0 docno rank score tag` lines in relation row order.
pub fn write_trec_run(rel: &Relation, tag: &str) -> Result<String, FrameError> {
    let qid = rel.require_text(col::QID)?;
    let docno = rel.require_text(col::DOCNO)?;
    let rank = rel.require_typed(col::RANK, ColumnType::Int64)?;
    let score = rel.require_typed(col::SCORE, ColumnType::Float64)?;
    let mut out = String::new();
    for row in rel.rows() {
        writeln!(
            out,
            "{} Q0 {} {} {} {}",
            row[qid],
            row[docno],
            row[rank],
            format_float(row[score].as_f64().unwrap_or(f64::NAN)),
            tag
        )
        .expect("write to string");
    }
    Ok(out)
}

fn canonical_number(x: f64) -> Json {
    format_float(x)
        .parse::<f64>()
        .ok()
        .and_then(Number::from_f64)
        .map_or(Json::Null, Json::Number)
}

/// JSON form of a cell; floats are rounded to six decimals.
pub fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Null => Json::Null,
        Value::Text(s) => Json::String(s.clone()),
        Value::Float(x) => canonical_number(*x),
        Value::Int(i) => Json::Number((*i).into()),
        Value::Vector(xs) => Json::Array(xs.iter().map(|x| canonical_number(*x)).collect()),
    }
}

/// One flat JSON object per row, keys in schema order.
pub fn relation_to_json_rows(rel: &Relation) -> Vec<Json> {
    rel.rows()
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (spec, v) in rel.schema().columns().iter().zip(row) {
                obj.insert(spec.name.clone(), value_to_json(v));
            }
            Json::Object(obj)
        })
        .collect()
}

/// Header line of column names, then one tab-separated line per row.
pub fn write_tsv(rel: &Relation) -> String {
    let mut out = String::new();
    let names: Vec<&str> = rel.schema().columns().iter().map(|c| c.name.as_str()).collect();
    let _ = writeln!(out, "{}", names.join("\t"));
    for row in rel.rows() {
        let cells: Vec<String> = row
            .iter()
            .map(|v| v.to_string().replace(['\t', '\n', '\r'], " "))
            .collect();
        let _ = writeln!(out, "{}", cells.join("\t"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{sort_and_rank, Schema};

    #[test]
    fn tsv_has_header_and_flat_cells() {
        let rel = Relation::from_queries([("q1", "a\tb")]);
        assert_eq!(write_tsv(&rel), "qid\tquery\nq1\ta b\n");
    }

    #[test]
    fn topics_parse() {
        let rel = parse_topics("q1\tquick fox\r\n\nq2\tlazy dog\n").unwrap();
        assert_eq!(rel.len(), 2);
        assert_eq!(rel.rows()[1][1], Value::Text("lazy dog".into()));
    }

    #[test]
    fn topics_errors_carry_line() {
        assert_eq!(
            parse_topics("q1\ta\nbroken\n"),
            Err(FrameError::Topics {
                line: 2,
                reason: "expected `qid<TAB>query`".into()
            })
        );
        assert!(matches!(
            parse_topics("q1\ta\nq1\tb"),
            Err(FrameError::Topics { line: 2, .. })
        ));
    }

    #[test]
    fn trec_lines() {
        let schema = Schema::of_names(["qid", "docno", "score"]).unwrap();
        let rel = Relation::new(
            schema,
            vec![
                vec![Value::Text("q1".into()), Value::Text("d1".into()), Value::Float(1.5)],
                vec![Value::Text("q1".into()), Value::Text("d2".into()), Value::Float(2.25)],
            ],
        )
        .unwrap();
        let ranked = sort_and_rank(&rel).unwrap();
        assert_eq!(
            write_trec_run(&ranked, "run").unwrap(),
            "q1 Q0 d2 0 2.250000 run\nq1 Q0 d1 1 1.500000 run\n"
        );
    }

    #[test]
    fn json_rounds_floats() {
        assert_eq!(value_to_json(&Value::Float(0.1234567)).to_string(), "0.123457");
        assert_eq!(value_to_json(&Value::Float(f64::NAN)), Json::Null);
        let rows = relation_to_json_rows(&Relation::from_queries([("q1", "a")]));
        assert_eq!(rows[0].to_string(), r#"{"qid":"q1","query":"a"}"#);
    }
}
