//! Query sets drawn from a ground-truth network and MAE scoring.

use std::io::Write;

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::bn::{bn_predict, forward_sample, variable_elimination, Assignment, Dag, DiscreteBayesNet, Distribution};
use crate::understudy::{sample_mask, UnderstudyModel};
use crate::{Error, Result};

/// Per-target MAE is the mean absolute error over the target's states.
pub const MAE_CONVENTION: &str = "mean-over-states";

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub evidence: Assignment,
    /// All non-evidence variables, ascending.
    pub targets: Vec<usize>,
    /// Ground-truth distribution per target, aligned with `targets`.
    pub truth: Vec<Distribution>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryKind {
    Total,
    Sample,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuerySet {
    pub kind: QueryKind,
    pub queries: Vec<Query>,
    /// Evidence assignments left out because they are impossible under the
    /// ground truth (total set only).
    pub skipped: usize,
}

impl QuerySet {
    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn empty_evidence_count(&self) -> usize {
        self.queries.iter().filter(|q| q.evidence.is_empty()).count()
    }

    /// One JSON object per line: evidence and truth keyed by variable name,
    /// states by label.
    pub fn write_jsonl<W: Write>(&self, dag: &Dag, mut out: W) -> Result<()> {
        for q in &self.queries {
            let evidence: Map<String, Value> = q
                .evidence
                .iter()
                .map(|(v, s)| (dag.name(v).to_string(), Value::from(dag.variable(v).states[s].clone())))
                .collect();
            let targets: Vec<Value> = q.targets.iter().map(|&t| Value::from(dag.name(t))).collect();
            let truth: Map<String, Value> = q
                .truth
                .iter()
                .map(|d| (dag.name(d.variable).to_string(), Value::from(d.probs.clone())))
                .collect();
            let line = serde_json::json!({"evidence": evidence, "targets": targets, "truth": truth});
            writeln!(out, "{line}").map_err(|e| Error::io("<query set>", e))?;
        }
        Ok(())
    }
}

fn make_query(net: &DiscreteBayesNet, evidence: Assignment) -> Result<Query> {
    let targets: Vec<usize> = (0..net.len()).filter(|&v| !evidence.contains(v)).collect();
    let truth = targets
        .iter()
        .map(|&t| variable_elimination(net, &evidence, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(Query {
        evidence,
        targets,
        truth,
    })
}

/// Every evidence subset of size `0..N` crossed with every joint state of
/// that subset, in order of subset size, subset, then state.
pub fn build_total_query_set(net: &DiscreteBayesNet) -> Result<QuerySet> {
    let n = net.len();
    let dag = net.dag();
    let mut queries = Vec::new();
    let mut skipped = 0;
    for m in 0..n {
        for subset in (0..n).combinations(m) {
            let states = subset
                .iter()
                .map(|&v| 0..dag.cardinality(v))
                .multi_cartesian_product();
            // multi_cartesian_product of nothing yields nothing
            let assignments: Box<dyn Iterator<Item = Vec<usize>>> = if subset.is_empty() {
                Box::new(std::iter::once(Vec::new()))
            } else {
                Box::new(states)
            };
            for s in assignments {
                let evidence: Assignment = subset.iter().copied().zip(s).collect();
                match make_query(net, evidence) {
                    Ok(q) => queries.push(q),
                    Err(Error::ZeroProbabilityEvidence) => skipped += 1,
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(QuerySet {
        kind: QueryKind::Total,
        queries,
        skipped,
    })
}

/// `count` queries whose evidence values come from samples of the joint and
/// whose evidence variables follow the training split law.
pub fn build_sample_query_set<R: Rng + ?Sized>(
    net: &DiscreteBayesNet,
    rng: &mut R,
    count: usize,
) -> Result<QuerySet> {
    if count == 0 {
        return Err(Error::invalid("query count must be at least 1"));
    }
    let mut queries = Vec::with_capacity(count);
    for _ in 0..count {
        let sample = forward_sample(net, rng, 1)?.records.remove(0);
        let split = sample_mask(net.len(), rng)?;
        let evidence = Assignment::from_sample(&sample, split.evidence());
        queries.push(make_query(net, evidence)?);
    }
    Ok(QuerySet {
        kind: QueryKind::Sample,
        queries,
        skipped: 0,
    })
}

/// Mean over targets of the per-target mean absolute error over states.
pub fn query_mae(predicted: &[Distribution], truth: &[Distribution]) -> Result<f64> {
    if predicted.len() != truth.len() || predicted.is_empty() {
        return Err(Error::invalid("predictions and truth cover different targets"));
    }
    let mut total = 0.0;
    for (p, t) in predicted.iter().zip(truth) {
        if p.variable != t.variable || p.probs.len() != t.probs.len() {
            return Err(Error::invalid(format!(
                "prediction for #{} does not line up with truth for #{}",
                p.variable, t.variable
            )));
        }
        let per: f64 = p.probs.iter().zip(&t.probs).map(|(a, b)| (a - b).abs()).sum();
        total += per / p.probs.len() as f64;
    }
    Ok(total / predicted.len() as f64)
}

/// Answer to one query.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub distributions: Vec<Distribution>,
    /// The predictor ignored the evidence (BN with impossible evidence).
    pub fallback: bool,
}

pub trait Predictor {
    fn predict(&self, evidence: &Assignment, targets: &[usize]) -> Result<Prediction>;
}

impl Predictor for DiscreteBayesNet {
    fn predict(&self, evidence: &Assignment, targets: &[usize]) -> Result<Prediction> {
        let p = bn_predict(self, evidence, targets)?;
        Ok(Prediction {
            distributions: p.distributions,
            fallback: p.fallback,
        })
    }
}

impl Predictor for UnderstudyModel {
    fn predict(&self, evidence: &Assignment, targets: &[usize]) -> Result<Prediction> {
        Ok(Prediction {
            distributions: UnderstudyModel::predict(self, evidence, targets)?,
            fallback: false,
        })
    }
}

/// Adapter for ad-hoc predictors.
pub struct FnPredictor<F>(pub F);

impl<F> Predictor for FnPredictor<F>
where
    F: Fn(&Assignment, &[usize]) -> Result<Vec<Distribution>>,
{
    fn predict(&self, evidence: &Assignment, targets: &[usize]) -> Result<Prediction> {
        Ok(Prediction {
            distributions: (self.0)(evidence, targets)?,
            fallback: false,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub model: String,
    pub train_size: usize,
    pub seed: u64,
    pub dag_variant: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaeReport {
    pub kind: QueryKind,
    pub per_query: Vec<f64>,
    pub mean: f64,
    pub fallback_count: usize,
    pub empty_evidence_queries: usize,
    pub convention: &'static str,
    pub meta: ReportMeta,
}

/// Score `predictor` on every query of `set`.
pub fn evaluate<P: Predictor + ?Sized>(predictor: &P, set: &QuerySet) -> Result<MaeReport> {
    if set.is_empty() {
        return Err(Error::invalid("empty query set"));
    }
    let mut per_query = Vec::with_capacity(set.len());
    let mut fallback_count = 0;
    for (index, q) in set.queries.iter().enumerate() {
        let wrap = |e: Error| Error::Query {
            index,
            source: Box::new(e),
        };
        let pred = predictor.predict(&q.evidence, &q.targets).map_err(wrap)?;
        fallback_count += usize::from(pred.fallback);
        per_query.push(query_mae(&pred.distributions, &q.truth).map_err(wrap)?);
    }
    let mean = per_query.iter().sum::<f64>() / per_query.len() as f64;
    Ok(MaeReport {
        kind: set.kind,
        per_query,
        mean,
        fallback_count,
        empty_evidence_queries: set.empty_evidence_count(),
        convention: MAE_CONVENTION,
        meta: ReportMeta::default(),
    })
}
