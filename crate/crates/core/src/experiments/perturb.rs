use rand::seq::index::sample;
use rand::Rng;

use super::DagMode;
use crate::bn::Dag;
use crate::{Error, Result};

/// Every DAG one edge away from `dag` in `mode`, in a fixed order: removals
/// follow edge order, additions follow (parent, child) order.
///
/// An addition `p -> c` is legal when the edge is absent and `c` does not
/// already reach `p`. `Base` yields the DAG itself.
pub fn legal_perturbations(dag: &Dag, mode: DagMode) -> Result<Vec<Dag>> {
    match mode {
        DagMode::Base => Ok(vec![dag.clone()]),
        DagMode::Remove => dag
            .edges()
            .iter()
            .map(|e| {
                let kept = dag.edges().iter().copied().filter(|x| x != e).collect();
                dag.with_edges(kept)
            })
            .collect(),
        DagMode::Add => {
            let n = dag.len();
            let mut out = Vec::new();
            for p in 0..n {
                for c in 0..n {
                    if p == c || dag.has_edge(p, c) || dag.reaches(c, p) {
                        continue;
                    }
                    let mut edges = dag.edges().to_vec();
                    edges.push((p, c));
                    out.push(dag.with_edges(edges)?);
                }
            }
            Ok(out)
        }
    }
}

/// One uniformly drawn single-edge perturbation.
pub fn perturb_dag<R: Rng + ?Sized>(dag: &Dag, mode: DagMode, rng: &mut R) -> Result<Dag> {
    let mut options = legal_perturbations(dag, mode)?;
    if options.is_empty() {
        return Err(Error::NoLegalPerturbation(mode.to_string()));
    }
    let i = rng.gen_range(0..options.len());
    Ok(options.swap_remove(i))
}

/// `count` distinct perturbations drawn without replacement.
pub fn perturb_variants<R: Rng + ?Sized>(
    dag: &Dag,
    mode: DagMode,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Dag>> {
    let options = legal_perturbations(dag, mode)?;
    if options.is_empty() || count > options.len() {
        return Err(Error::NoLegalPerturbation(format!(
            "{mode}: {count} variants requested, {} available",
            options.len()
        )));
    }
    Ok(sample(rng, options.len(), count)
        .into_iter()
        .map(|i| options[i].clone())
        .collect())
}
