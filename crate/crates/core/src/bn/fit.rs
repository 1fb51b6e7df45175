use super::{Cpt, Dag, Dataset, DiscreteBayesNet};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FitSummary {
    pub samples: usize,
    /// CPT rows whose parent combination never occurs in the data; these
    /// rows are uniform.
    pub unseen_rows: usize,
}

impl FitSummary {
    pub fn empty_dataset(&self) -> bool {
        self.samples == 0
    }
}

/// Maximum likelihood with a K2 (Dirichlet(1)) prior: every cell gets one
/// pseudo-count, so `P(j | c) = (n_jc + 1) / (n_c + card)`.
pub fn fit_mle_k2(dag: &Dag, data: &Dataset) -> Result<DiscreteBayesNet> {
    fit_mle_k2_with_summary(dag, data).map(|(net, _)| net)
}

pub fn fit_mle_k2_with_summary(dag: &Dag, data: &Dataset) -> Result<(DiscreteBayesNet, FitSummary)> {
    data.validate(dag)?;
    let mut summary = FitSummary {
        samples: data.len(),
        unseen_rows: 0,
    };
    let mut cpts = Vec::with_capacity(dag.len());
    for v in 0..dag.len() {
        let parents = dag.parents(v).to_vec();
        let card = dag.cardinality(v);
        let rows: usize = parents.iter().map(|&p| dag.cardinality(p)).product();
        let mut counts = vec![0u64; rows * card];
        for rec in &data.records {
            let row = parents
                .iter()
                .fold(0, |acc, &p| acc * dag.cardinality(p) + rec[p]);
            counts[row * card + rec[v]] += 1;
        }
        let mut table = Vec::with_capacity(counts.len());
        for row in counts.chunks(card) {
            let n: u64 = row.iter().sum();
            if n == 0 {
                summary.unseen_rows += 1;
            }
            let denom = (n + card as u64) as f64;
            table.extend(row.iter().map(|&c| (c + 1) as f64 / denom));
        }
        cpts.push(Cpt::new(dag, v, parents, table)?);
    }
    Ok((DiscreteBayesNet::from_parts(dag.clone(), cpts)?, summary))
}
