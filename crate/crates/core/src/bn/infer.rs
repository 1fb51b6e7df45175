//! Exact inference by variable elimination.

use std::collections::BTreeSet;

use super::{Assignment, Distribution, DiscreteBayesNet};
use crate::{Error, Result};

/// Table over a sorted scope of variables; last variable fastest-varying.
#[derive(Debug, Clone)]
struct Factor {
    scope: Vec<usize>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

impl Factor {
    /// CPT of `v` with evidence variables fixed and dropped from the scope.
    fn from_cpt(net: &DiscreteBayesNet, v: usize, evidence: &Assignment) -> Factor {
        let cpt = net.cpt(v);
        let mut full: Vec<usize> = cpt.parents().to_vec();
        full.push(v);
        let scope: Vec<usize> = {
            let mut s: Vec<usize> = full.iter().copied().filter(|&u| !evidence.contains(u)).collect();
            s.sort_unstable();
            s
        };
        let cards: Vec<usize> = scope.iter().map(|&u| net.dag().cardinality(u)).collect();
        let size: usize = cards.iter().product();
        let mut values = Vec::with_capacity(size);
        let mut sample = vec![0usize; net.len()];
        for (u, s) in evidence.iter() {
            sample[u] = s;
        }
        let mut states = vec![0usize; scope.len()];
        for _ in 0..size {
            for (&u, &s) in scope.iter().zip(&states) {
                sample[u] = s;
            }
            values.push(cpt.prob(&sample));
            advance(&mut states, &cards);
        }
        Factor {
            scope,
            cards,
            values,
        }
    }

    fn product(&self, other: &Factor) -> Factor {
        let scope: Vec<usize> = self
            .scope
            .iter()
            .chain(&other.scope)
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let cards: Vec<usize> = scope
            .iter()
            .map(|u| {
                self.card_of(*u)
                    .or_else(|| other.card_of(*u))
                    .expect("variable in union scope")
            })
            .collect();
        let strides_a = self.strides_in(&scope);
        let strides_b = other.strides_in(&scope);
        let size: usize = cards.iter().product();
        let mut values = Vec::with_capacity(size);
        let mut states = vec![0usize; scope.len()];
        for _ in 0..size {
            let ia: usize = states.iter().zip(&strides_a).map(|(s, st)| s * st).sum();
            let ib: usize = states.iter().zip(&strides_b).map(|(s, st)| s * st).sum();
            values.push(self.values[ia] * other.values[ib]);
            advance(&mut states, &cards);
        }
        Factor {
            scope,
            cards,
            values,
        }
    }

    fn sum_out(&self, v: usize) -> Factor {
        let pos = self.scope.iter().position(|&u| u == v).expect("variable in scope");
        let card = self.cards[pos];
        let inner: usize = self.cards[pos + 1..].iter().product();
        let outer: usize = self.cards[..pos].iter().product();
        let mut values = vec![0.0; outer * inner];
        for o in 0..outer {
            for s in 0..card {
                let base = (o * card + s) * inner;
                for i in 0..inner {
                    values[o * inner + i] += self.values[base + i];
                }
            }
        }
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(pos);
        cards.remove(pos);
        Factor {
            scope,
            cards,
            values,
        }
    }

    fn card_of(&self, v: usize) -> Option<usize> {
        self.scope.iter().position(|&u| u == v).map(|i| self.cards[i])
    }

    /// Strides of this factor's variables laid over `scope` (0 where absent).
    fn strides_in(&self, scope: &[usize]) -> Vec<usize> {
        let mut own = vec![0usize; self.scope.len()];
        let mut acc = 1;
        for i in (0..self.scope.len()).rev() {
            own[i] = acc;
            acc *= self.cards[i];
        }
        scope
            .iter()
            .map(|u| {
                self.scope
                    .iter()
                    .position(|w| w == u)
                    .map_or(0, |i| own[i])
            })
            .collect()
    }
}

fn advance(states: &mut [usize], cards: &[usize]) {
    for i in (0..states.len()).rev() {
        states[i] += 1;
        if states[i] < cards[i] {
            return;
        }
        states[i] = 0;
    }
}

/// Next variable to eliminate: fewest neighbours in the interaction graph
/// of the current factors, ties to the lowest index.
fn min_degree(factors: &[Factor], remaining: &BTreeSet<usize>) -> usize {
    remaining
        .iter()
        .copied()
        .min_by_key(|&v| {
            let neighbours: BTreeSet<usize> = factors
                .iter()
                .filter(|f| f.scope.contains(&v))
                .flat_map(|f| f.scope.iter().copied())
                .filter(|&u| u != v)
                .collect();
            (neighbours.len(), v)
        })
        .expect("non-empty elimination set")
}

/// Exact `P(target | evidence)`.
///
/// Fails with [`Error::ZeroProbabilityEvidence`] when the evidence has no
/// mass under the network.
pub fn variable_elimination(
    net: &DiscreteBayesNet,
    evidence: &Assignment,
    target: usize,
) -> Result<Distribution> {
    evidence.validate(net.dag())?;
    if target >= net.len() {
        return Err(Error::UnknownVariable(format!("#{target}")));
    }
    if evidence.contains(target) {
        return Err(Error::TargetInEvidence(net.dag().name(target).to_string()));
    }
    let mut factors: Vec<Factor> = (0..net.len())
        .map(|v| Factor::from_cpt(net, v, evidence))
        .collect();
    let mut remaining: BTreeSet<usize> = (0..net.len())
        .filter(|&v| v != target && !evidence.contains(v))
        .collect();
    while !remaining.is_empty() {
        let v = min_degree(&factors, &remaining);
        remaining.remove(&v);
        let (touching, rest): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.scope.contains(&v));
        factors = rest;
        if let Some(first) = touching.first() {
            let joined = touching[1..].iter().fold(first.clone(), |acc, f| acc.product(f));
            factors.push(joined.sum_out(v));
        }
    }
    let card = net.dag().cardinality(target);
    let mut probs = vec![1.0; card];
    for f in &factors {
        match f.scope.as_slice() {
            [] => probs.iter_mut().for_each(|p| *p *= f.values[0]),
            [u] if *u == target => probs.iter_mut().zip(&f.values).for_each(|(p, x)| *p *= x),
            _ => unreachable!("all non-target variables were eliminated"),
        }
    }
    let z: f64 = probs.iter().sum();
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::ZeroProbabilityEvidence);
    }
    probs.iter_mut().for_each(|p| *p /= z);
    Ok(Distribution {
        variable: target,
        probs,
    })
}

/// Per-target answers of a BN, with the unconditional fallback applied
/// when the evidence has zero probability.
#[derive(Debug, Clone, PartialEq)]
pub struct BnPrediction {
    pub distributions: Vec<Distribution>,
    pub fallback: bool,
}

/// Answer a multi-target query one marginal per target. If the evidence is
/// impossible under `net`, the evidence is dropped and `P(target)` returned.
pub fn bn_predict(
    net: &DiscreteBayesNet,
    evidence: &Assignment,
    targets: &[usize],
) -> Result<BnPrediction> {
    let mut fallback = false;
    let mut distributions = Vec::with_capacity(targets.len());
    for &t in targets {
        let d = if fallback {
            variable_elimination(net, &Assignment::new(), t)?
        } else {
            match variable_elimination(net, evidence, t) {
                Ok(d) => d,
                Err(Error::ZeroProbabilityEvidence) => {
                    fallback = true;
                    variable_elimination(net, &Assignment::new(), t)?
                }
                Err(e) => return Err(e),
            }
        };
        distributions.push(d);
    }
    Ok(BnPrediction {
        distributions,
        fallback,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::{build_network, CptSpec, VariableSpec};

    fn spec(v: &str, parents: &[&str], rows: Vec<Vec<f64>>) -> CptSpec {
        CptSpec {
            variable: v.into(),
            parents: parents.iter().map(|p| p.to_string()).collect(),
            rows,
        }
    }

    #[test]
    fn independent_evidence_is_ignored() {
        let net = build_network(
            vec![
                VariableSpec::with_cardinality("x", 2),
                VariableSpec::with_cardinality("y", 2),
            ],
            &[],
            &[
                spec("x", &[], vec![vec![0.7, 0.3]]),
                spec("y", &[], vec![vec![0.4, 0.6]]),
            ],
        )
        .unwrap();
        let ev: Assignment = [(0, 1)].into_iter().collect();
        let d = variable_elimination(&net, &ev, 1).unwrap();
        assert!((d.probs[1] - 0.6).abs() < 1e-15);
        assert!(matches!(
            variable_elimination(&net, &ev, 0),
            Err(Error::TargetInEvidence(_))
        ));
    }

    fn deterministic_chain() -> DiscreteBayesNet {
        // b copies a exactly
        build_network(
            vec![
                VariableSpec::with_cardinality("a", 2),
                VariableSpec::with_cardinality("b", 2),
                VariableSpec::with_cardinality("c", 2),
            ],
            &[("a".into(), "b".into())],
            &[
                spec("a", &[], vec![vec![0.25, 0.75]]),
                spec("b", &["a"], vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
                spec("c", &[], vec![vec![0.5, 0.5]]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn impossible_evidence_is_signalled() {
        let net = deterministic_chain();
        let ev: Assignment = [(0, 0), (1, 1)].into_iter().collect();
        assert!(matches!(
            variable_elimination(&net, &ev, 2),
            Err(Error::ZeroProbabilityEvidence)
        ));
    }

    #[test]
    fn predict_falls_back_to_marginals() {
        let net = deterministic_chain();
        let ev: Assignment = [(0, 0), (1, 1)].into_iter().collect();
        let p = bn_predict(&net, &ev, &[2]).unwrap();
        assert!(p.fallback);
        assert_eq!(p.distributions[0].probs, vec![0.5, 0.5]);

        let p = bn_predict(&net, &Assignment::new(), &[0, 1, 2]).unwrap();
        assert!(!p.fallback);
        assert!((p.distributions[1].probs[1] - 0.75).abs() < 1e-15);

        let ev: Assignment = [(1, 1)].into_iter().collect();
        let p = bn_predict(&net, &ev, &[0]).unwrap();
        assert!(!p.fallback);
        assert_eq!(p.distributions[0].probs, vec![0.0, 1.0]);
    }
}
