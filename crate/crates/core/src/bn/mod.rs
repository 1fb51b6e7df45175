//! Discrete Bayesian networks: structure, CPTs, sampling, exact inference
//! and smoothed maximum-likelihood fitting.

mod dag;
mod fit;
mod infer;
pub mod io;
mod network;
mod sample;

use std::collections::BTreeMap;

pub use dag::{Dag, VariableSpec};
pub use fit::{fit_mle_k2, fit_mle_k2_with_summary, FitSummary};
pub use infer::{bn_predict, variable_elimination, BnPrediction};
pub use network::{build_network, Cpt, CptSpec, DiscreteBayesNet};
pub use sample::forward_sample;

/// Partial assignment of states to variables, keyed by variable index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(BTreeMap<usize, usize>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, var: usize, state: usize) -> Option<usize> {
        self.0.insert(var, state)
    }

    pub fn get(&self, var: usize) -> Option<usize> {
        self.0.get(&var).copied()
    }

    pub fn contains(&self, var: usize) -> bool {
        self.0.contains_key(&var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(variable, state)` pairs in variable order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().map(|(&v, &s)| (v, s))
    }

    pub fn variables(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    /// Restriction of a full sample to `vars`.
    pub fn from_sample(sample: &[usize], vars: impl IntoIterator<Item = usize>) -> Self {
        Assignment(vars.into_iter().map(|v| (v, sample[v])).collect())
    }

    /// Check every entry against the variable set of `dag`.
    pub fn validate(&self, dag: &Dag) -> crate::Result<()> {
        for (v, s) in self.iter() {
            let spec = dag
                .variables()
                .get(v)
                .ok_or_else(|| crate::Error::UnknownVariable(format!("#{v}")))?;
            if s >= spec.cardinality() {
                return Err(crate::Error::StateOutOfRange {
                    variable: spec.name.clone(),
                    index: s,
                    cardinality: spec.cardinality(),
                });
            }
        }
        Ok(())
    }
}

impl FromIterator<(usize, usize)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

/// Full samples, one state index per variable in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub records: Vec<Vec<usize>>,
    /// Seed the records were drawn with, when known.
    pub seed: Option<u64>,
}

impl Dataset {
    pub fn new(records: Vec<Vec<usize>>) -> Self {
        Dataset {
            records,
            seed: None,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn validate(&self, dag: &Dag) -> crate::Result<()> {
        let vars = dag.variables();
        for rec in &self.records {
            if rec.len() != vars.len() {
                return Err(crate::Error::invalid(format!(
                    "record has {} values, network has {} variables",
                    rec.len(),
                    vars.len()
                )));
            }
            for (spec, &s) in vars.iter().zip(rec) {
                if s >= spec.cardinality() {
                    return Err(crate::Error::StateOutOfRange {
                        variable: spec.name.clone(),
                        index: s,
                        cardinality: spec.cardinality(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Probability vector over the states of one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub variable: usize,
    pub probs: Vec<f64>,
}

impl Distribution {
    pub fn uniform(variable: usize, cardinality: usize) -> Self {
        Distribution {
            variable,
            probs: vec![1.0 / cardinality as f64; cardinality],
        }
    }
}
