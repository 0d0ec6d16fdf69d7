//! Random fusion instances and brute-force fusion oracles.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use flowrank::algebra::PipelineNode;
use flowrank::cols;
use flowrank::frames::{sort_and_rank, Relation, Schema, Value};
use flowrank::transformers::{Transformer, TransformerSpec};

/// `(qid, docno, score)` triples of one child run.
pub type Run = Vec<(String, String, f64)>;

#[derive(Debug, Clone)]
pub struct Instance {
    pub qids: Vec<String>,
    pub runs: Vec<Run>,
}

pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    let n_q = rng.gen_range(1..=5);
    let n_d = rng.gen_range(1..=20);
    let qids: Vec<String> = (0..n_q).map(|i| format!("q{i}")).collect();
    let docnos: Vec<String> = (0..n_d).map(|i| format!("doc{i:02}")).collect();
    let integer_scores = rng.gen_bool(0.5);
    let runs = (0..rng.gen_range(2..=4))
        .map(|_| {
            let mut run = Vec::new();
            for q in &qids {
                let k = rng.gen_range(0..=n_d);
                for d in docnos.choose_multiple(rng, k) {
                    let s = if integer_scores {
                        rng.gen_range(0..8) as f64
                    } else {
                        rng.gen_range(-10.0..10.0)
                    };
                    run.push((q.clone(), d.clone(), s));
                }
            }
            run
        })
        .collect();
    Instance { qids, runs }
}

pub fn run_relation(run: &Run) -> Relation {
    let schema = Schema::of_names(["qid", "docno", "score", "rank"]).unwrap();
    let rows = run
        .iter()
        .map(|(q, d, s)| {
            vec![
                Value::Text(q.clone()),
                Value::Text(d.clone()),
                Value::Float(*s),
                Value::Int(0),
            ]
        })
        .collect();
    sort_and_rank(&Relation::new(schema, rows).unwrap()).unwrap()
}

/// A leaf that ignores its input and returns a fixed run.
pub fn constant(name: &str, rel: Relation) -> PipelineNode {
    PipelineNode::Leaf(Transformer::new(
        name,
        "",
        TransformerSpec::single(cols!["qid"], cols!["qid", "docno", "score", "rank"], false),
        move |_| Ok(rel.clone()),
    ))
}

pub fn children(inst: &Instance) -> Vec<PipelineNode> {
    inst.runs
        .iter()
        .enumerate()
        .map(|(i, r)| constant(&format!("run{i}"), run_relation(r)))
        .collect()
}

pub fn queries(inst: &Instance) -> Relation {
    Relation::from_queries(inst.qids.iter().map(|q| (q.clone(), "q".to_string())))
}

/// Per qid: docnos with fused scores in final order.
pub type Fused = BTreeMap<String, Vec<(String, f64)>>;

fn order(scores: BTreeMap<(String, String), f64>) -> Fused {
    let mut out: Fused = BTreeMap::new();
    for ((q, d), s) in scores {
        out.entry(q).or_default().push((d, s));
    }
    for docs in out.values_mut() {
        docs.sort_by(|a, b| (b.1 + 0.0).total_cmp(&(a.1 + 0.0)).then_with(|| a.0.cmp(&b.0)));
    }
    out
}

/// Correctly rounded sum (Shewchuk), so the result depends only on the
/// multiset of terms and not on their order.
pub fn fsum(xs: &[f64]) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for &x in xs {
        let mut x = x;
        let mut kept = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        partials.truncate(kept);
        partials.push(x);
    }
    // round the exact sum of the partials, largest magnitude last
    let Some(mut hi) = partials.pop() else { return 0.0 };
    let mut lo = 0.0;
    while let Some(y) = partials.pop() {
        let x = hi;
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    if let Some(&next) = partials.last() {
        if (lo < 0.0 && next < 0.0) || (lo > 0.0 && next > 0.0) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
    }
    hi + 0.0
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact non-negative fraction.
#[derive(Clone, Copy)]
struct Ratio(u128, u128);

impl Ratio {
    fn add_unit(self, den: u128) -> Ratio {
        let (n, d) = (self.0 * den + self.1, self.1 * den);
        let g = gcd(n, d);
        Ratio(n / g, d / g)
    }

    fn cmp(&self, other: &Ratio) -> std::cmp::Ordering {
        (self.0 * other.1).cmp(&(other.0 * self.1))
    }
}

/// Σ 1/(k + r) with r the 1-based rank of the document in each run, ordered
/// by the exact rational sum. `k` must be a whole number.
pub fn rrf_oracle(inst: &Instance, k: f64) -> Fused {
    assert_eq!(k.fract(), 0.0);
    let k = k as u128;
    let mut sums: BTreeMap<(String, String), Ratio> = BTreeMap::new();
    for run in &inst.runs {
        let mut by_q: BTreeMap<&str, Vec<(&str, f64)>> = BTreeMap::new();
        for (q, d, s) in run {
            by_q.entry(q).or_default().push((d, *s));
        }
        for (q, mut docs) in by_q {
            docs.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
            for (i, (d, _)) in docs.into_iter().enumerate() {
                let r = sums.entry((q.to_string(), d.to_string())).or_insert(Ratio(0, 1));
                *r = r.add_unit(k + i as u128 + 1);
            }
        }
    }
    let mut out: BTreeMap<String, Vec<(String, Ratio)>> = BTreeMap::new();
    for ((q, d), r) in sums {
        out.entry(q).or_default().push((d, r));
    }
    out.into_iter()
        .map(|(q, mut docs)| {
            docs.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            let docs = docs.into_iter().map(|(d, r)| (d, r.0 as f64 / r.1 as f64)).collect();
            (q, docs)
        })
        .collect()
}

/// Σ w_i · score_i, documents missing from a run contributing 0.
pub fn linear_oracle(inst: &Instance, weights: &[f64]) -> Fused {
    let mut terms: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for (run, w) in inst.runs.iter().zip(weights) {
        for (q, d, s) in run {
            terms.entry((q.clone(), d.clone())).or_default().push(w * s);
        }
    }
    order(terms.into_iter().map(|(key, t)| (key, fsum(&t))).collect())
}

pub fn fused_of(rel: &Relation) -> Fused {
    let (q, d, s, r) = (
        rel.index_of("qid").unwrap(),
        rel.index_of("docno").unwrap(),
        rel.index_of("score").unwrap(),
        rel.index_of("rank").unwrap(),
    );
    let mut out: Fused = BTreeMap::new();
    let mut last: Option<(String, i64)> = None;
    for row in rel.rows() {
        let qid = row[q].as_text().unwrap().to_string();
        let rank = row[r].as_i64().unwrap();
        let expected_rank = match &last {
            Some((lq, lr)) if *lq == qid => lr + 1,
            _ => 0,
        };
        assert_eq!(rank, expected_rank, "ranks run 0.. within each qid");
        last = Some((qid.clone(), rank));
        out.entry(qid)
            .or_default()
            .push((row[d].as_text().unwrap().to_string(), row[s].as_f64().unwrap()));
    }
    out
}

/// Same docno order per qid and scores within `tol`.
pub fn compare(actual: &Fused, expected: &Fused, tol: f64) -> Result<(), String> {
    if actual.keys().ne(expected.keys()) {
        return Err(format!(
            "qids differ: {:?} vs {:?}",
            actual.keys().collect::<Vec<_>>(),
            expected.keys().collect::<Vec<_>>()
        ));
    }
    for (q, exp) in expected {
        let act = &actual[q];
        let a: Vec<&str> = act.iter().map(|x| x.0.as_str()).collect();
        let e: Vec<&str> = exp.iter().map(|x| x.0.as_str()).collect();
        if a != e {
            return Err(format!("{q}: ranking {a:?} vs {e:?}"));
        }
        for ((d, x), (_, y)) in act.iter().zip(exp) {
            if (x - y).abs() > tol {
                return Err(format!("{q}/{d}: score {x} vs {y}"));
            }
        }
    }
    Ok(())
}

/// Applies `f` to every score of every run.
pub fn rescaled(inst: &Instance, f: impl Fn(f64) -> f64) -> Instance {
    Instance {
        qids: inst.qids.clone(),
        runs: inst
            .runs
            .iter()
            .map(|run| run.iter().map(|(q, d, s)| (q.clone(), d.clone(), f(*s))).collect())
            .collect(),
    }
}
