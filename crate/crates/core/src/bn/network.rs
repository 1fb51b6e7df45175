use serde::{Deserialize, Serialize};

use super::{Assignment, Dag, VariableSpec};
use crate::{Error, Result};

const ROW_TOLERANCE: f64 = 1e-9;

/// CPT as it appears in a network file: rows addressed by parent names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CptSpec {
    pub variable: String,
    pub parents: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Conditional probability table of one variable.
///
/// Rows enumerate parent-state combinations lexicographically, parents in
/// the order of `parents`, last parent fastest-varying.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    variable: usize,
    parents: Vec<usize>,
    parent_cards: Vec<usize>,
    cardinality: usize,
    table: Vec<f64>,
}

impl Cpt {
    /// Validated table from flat row-major values.
    pub fn new(dag: &Dag, variable: usize, parents: Vec<usize>, table: Vec<f64>) -> Result<Self> {
        let name = dag.name(variable).to_string();
        let bad = |reason: String| Error::InvalidCpt {
            variable: name.clone(),
            reason,
        };
        let mut expected = dag.parents(variable).to_vec();
        let mut given = parents.clone();
        given.sort_unstable();
        given.dedup();
        expected.sort_unstable();
        if given != expected || given.len() != parents.len() {
            return Err(bad("parents do not match the DAG".into()));
        }
        let parent_cards: Vec<usize> = parents.iter().map(|&p| dag.cardinality(p)).collect();
        let cardinality = dag.cardinality(variable);
        let rows: usize = parent_cards.iter().product();
        if table.len() != rows * cardinality {
            return Err(bad(format!(
                "expected {rows} rows of {cardinality} entries, got {} values",
                table.len()
            )));
        }
        for (r, row) in table.chunks(cardinality).enumerate() {
            if let Some(p) = row.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(bad(format!("row {r} has entry {p} outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(bad(format!("row {r} sums to {sum}")));
            }
        }
        Ok(Cpt {
            variable,
            parents,
            parent_cards,
            cardinality,
            table,
        })
    }

    pub fn variable(&self) -> usize {
        self.variable
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn row_count(&self) -> usize {
        self.table.len() / self.cardinality
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.table[r * self.cardinality..(r + 1) * self.cardinality]
    }

    /// Row index for parent states read from a full sample.
    pub fn row_index(&self, sample: &[usize]) -> usize {
        self.parents
            .iter()
            .zip(&self.parent_cards)
            .fold(0, |acc, (&p, &card)| acc * card + sample[p])
    }

    /// Row index for an explicit list of parent states (in `parents` order).
    pub fn row_index_of(&self, parent_states: &[usize]) -> usize {
        parent_states
            .iter()
            .zip(&self.parent_cards)
            .fold(0, |acc, (&s, &card)| acc * card + s)
    }

    pub fn prob(&self, sample: &[usize]) -> f64 {
        self.row(self.row_index(sample))[sample[self.variable]]
    }

    fn to_spec(&self, dag: &Dag) -> CptSpec {
        CptSpec {
            variable: dag.name(self.variable).to_string(),
            parents: self.parents.iter().map(|&p| dag.name(p).to_string()).collect(),
            rows: self.table.chunks(self.cardinality).map(<[f64]>::to_vec).collect(),
        }
    }
}

/// DAG plus one CPT per variable. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBayesNet {
    dag: Dag,
    cpts: Vec<Cpt>,
}

/// Validate and assemble a network from named parts.
pub fn build_network(
    variables: Vec<VariableSpec>,
    edges: &[(String, String)],
    cpts: &[CptSpec],
) -> Result<DiscreteBayesNet> {
    let dag = Dag::new(variables, edges)?;
    let mut slots: Vec<Option<Cpt>> = vec![None; dag.len()];
    for spec in cpts {
        let v = dag.index_of(&spec.variable)?;
        if slots[v].is_some() {
            return Err(Error::InvalidCpt {
                variable: spec.variable.clone(),
                reason: "defined twice".into(),
            });
        }
        let parents = spec
            .parents
            .iter()
            .map(|p| dag.index_of(p))
            .collect::<Result<Vec<_>>>()?;
        let table = spec.rows.iter().flatten().copied().collect();
        if spec.rows.iter().any(|r| r.len() != dag.cardinality(v)) {
            return Err(Error::InvalidCpt {
                variable: spec.variable.clone(),
                reason: format!("rows must have {} entries", dag.cardinality(v)),
            });
        }
        slots[v] = Some(Cpt::new(&dag, v, parents, table)?);
    }
    let cpts = slots
        .into_iter()
        .enumerate()
        .map(|(v, c)| {
            c.ok_or_else(|| Error::InvalidCpt {
                variable: dag.name(v).to_string(),
                reason: "missing".into(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiscreteBayesNet { dag, cpts })
}

impl DiscreteBayesNet {
    /// Assemble from already validated CPTs, one per variable in order.
    pub fn from_parts(dag: Dag, cpts: Vec<Cpt>) -> Result<Self> {
        if cpts.len() != dag.len() || cpts.iter().enumerate().any(|(v, c)| c.variable != v) {
            return Err(Error::invalid("need exactly one CPT per variable, in order"));
        }
        Ok(DiscreteBayesNet { dag, cpts })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    pub fn cpt(&self, v: usize) -> &Cpt {
        &self.cpts[v]
    }

    pub fn len(&self) -> usize {
        self.dag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dag.is_empty()
    }

    /// Independent parameters: `(cardinality - 1)` per CPT row.
    pub fn free_parameters(&self) -> usize {
        self.cpts
            .iter()
            .map(|c| c.row_count() * (c.cardinality - 1))
            .sum()
    }

    /// Product of the CPT entries selected by a full assignment.
    pub fn joint_probability(&self, full: &Assignment) -> Result<f64> {
        full.validate(&self.dag)?;
        let sample = (0..self.len())
            .map(|v| {
                full.get(v)
                    .ok_or_else(|| Error::IncompleteAssignment(self.dag.name(v).to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.joint_probability_of(&sample))
    }

    /// Same as [`joint_probability`](Self::joint_probability) for a dense sample.
    pub fn joint_probability_of(&self, sample: &[usize]) -> f64 {
        self.cpts.iter().map(|c| c.prob(sample)).product()
    }

    pub fn cpt_specs(&self) -> Vec<CptSpec> {
        self.cpts.iter().map(|c| c.to_spec(&self.dag)).collect()
    }
}
