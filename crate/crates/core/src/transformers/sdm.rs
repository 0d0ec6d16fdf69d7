use crate::cols;
use crate::frames::{col, format_float, ColumnSpec, ColumnType, Relation, Value};
use crate::index::tokenize;

use super::{AttrValue, ParamError, TransformError, Transformer, TransformerSpec};

/// Weights of the simplified sequential-dependence rewrite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdmParams {
    pub lambda_t: f64,
    pub lambda_o: f64,
}

impl Default for SdmParams {
    fn default() -> Self {
        SdmParams {
            lambda_t: 0.9,
            lambda_o: 0.1,
        }
    }
}

impl SdmParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.lambda_t.is_nan() || self.lambda_t < 0.0 {
            return Err(ParamError::new("lambda_t", "must be >= 0"));
        }
        if self.lambda_o.is_nan() || self.lambda_o < 0.0 {
            return Err(ParamError::new("lambda_o", "must be >= 0"));
        }
        if (self.lambda_t + self.lambda_o - 1.0).abs() > 1e-9 {
            return Err(ParamError::new("lambda_o", "lambda_t + lambda_o must equal 1"));
        }
        Ok(())
    }
}

/// `#w(λt) t1 … tn #ow(λo) t1 t2 #ow(λo) t2 t3 …`; single-token queries are
/// returned unchanged.
pub fn rewrite_query(query: &str, params: &SdmParams) -> Option<String> {
    let tokens = tokenize(query);
    match tokens.len() {
        0 => None,
        1 => Some(query.to_string()),
        _ => {
            let mut out = format!("#w({}) {}", format_float(params.lambda_t), tokens.join(" "));
            for pair in tokens.windows(2) {
                out.push_str(&format!(
                    " #ow({}) {} {}",
                    format_float(params.lambda_o),
                    pair[0],
                    pair[1]
                ));
            }
            Some(out)
        }
    }
}

pub fn sdm_rewriter(params: SdmParams) -> Result<Transformer, ParamError> {
    params.validate()?;
    let d = SdmParams::default();
    let t = Transformer::new(
        "sdm",
        "Sequential-dependence query rewriting: weights the original unigrams and adds ordered-window terms for each adjacent token pair.",
        TransformerSpec::single(cols!["qid", "query"], cols!["qid", "query"], false),
        move |rel: &Relation| {
            let qid = rel.require_text(col::QID)?;
            let query = rel.require_text(col::QUERY)?;
            let mut rows = Vec::with_capacity(rel.len());
            for i in 0..rel.len() {
                let q = rel.text_at(i, qid);
                let rewritten = rewrite_query(rel.text_at(i, query), &params)
                    .ok_or_else(|| TransformError::EmptyQuery { qid: q.to_string() })?;
                rows.push(vec![Value::Text(q.to_string()), Value::Text(rewritten)]);
            }
            let schema = crate::frames::Schema::new(vec![
                ColumnSpec::new(col::QID, ColumnType::Text),
                ColumnSpec::new(col::QUERY, ColumnType::Text),
            ])?;
            Ok(Relation::new(schema, rows)?)
        },
    );
    Ok(t.with_param(
        "lambda_t",
        AttrValue::Float(params.lambda_t),
        AttrValue::Float(d.lambda_t),
    )
    .with_param(
        "lambda_o",
        AttrValue::Float(params.lambda_o),
        AttrValue::Float(d.lambda_o),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rewrite_two_tokens() {
        assert_eq!(
            rewrite_query("quick fox", &SdmParams::default()).unwrap(),
            "#w(0.900000) quick fox #ow(0.100000) quick fox"
        );
    }

    #[test]
    fn rewrite_three_tokens_has_two_pairs() {
        assert_eq!(
            rewrite_query("The lazy Dog", &SdmParams::default()).unwrap(),
            "#w(0.900000) the lazy dog #ow(0.100000) the lazy #ow(0.100000) lazy dog"
        );
    }

    #[test]
    fn single_token_passthrough_and_empty() {
        assert_eq!(rewrite_query("fox", &SdmParams::default()).unwrap(), "fox");
        assert_eq!(rewrite_query("", &SdmParams::default()), None);

        let t = sdm_rewriter(SdmParams::default()).unwrap();
        let err = t.transform(&Relation::from_queries([("q1", "  ")])).unwrap_err();
        assert_eq!(err, TransformError::EmptyQuery { qid: "q1".into() });
    }

    #[test]
    fn weights_must_sum_to_one() {
        assert!(SdmParams {
            lambda_t: 0.8,
            lambda_o: 0.1
        }
        .validate()
        .is_err());
        assert!(SdmParams {
            lambda_t: 1.2,
            lambda_o: -0.2
        }
        .validate()
        .is_err());
        assert!(SdmParams {
            lambda_t: 0.7,
            lambda_o: 0.3
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn output_is_exactly_qid_query() {
        let t = sdm_rewriter(SdmParams::default()).unwrap();
        let out = t.transform(&Relation::from_queries([("q1", "quick fox")])).unwrap();
        assert_eq!(out.columns(), cols!["qid", "query"]);
    }
}
