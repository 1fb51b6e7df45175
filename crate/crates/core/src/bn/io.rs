//! Network files (JSON) and dataset files (CSV of state labels).

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{build_network, CptSpec, Dag, Dataset, DiscreteBayesNet, VariableSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub variables: Vec<VariableSpec>,
    pub edges: Vec<(String, String)>,
    pub cpts: Vec<CptSpec>,
}

impl NetworkFile {
    pub fn build(&self) -> Result<DiscreteBayesNet> {
        build_network(self.variables.clone(), &self.edges, &self.cpts)
    }
}

impl From<&DiscreteBayesNet> for NetworkFile {
    fn from(net: &DiscreteBayesNet) -> Self {
        NetworkFile {
            variables: net.dag().variables().to_vec(),
            edges: net.dag().named_edges(),
            cpts: net.cpt_specs(),
        }
    }
}

pub fn network_from_json(text: &str) -> Result<DiscreteBayesNet> {
    serde_json::from_str::<NetworkFile>(text)?.build()
}

pub fn network_to_json(net: &DiscreteBayesNet) -> Result<String> {
    Ok(serde_json::to_string_pretty(&NetworkFile::from(net))?)
}

pub fn read_network(path: impl AsRef<Path>) -> Result<DiscreteBayesNet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    network_from_json(&text)
}

pub fn write_network(path: impl AsRef<Path>, net: &DiscreteBayesNet) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, network_to_json(net)? + "\n").map_err(|e| Error::io(path, e))
}

/// Parse a dataset. The header must name every variable exactly once, in
/// any order; cells are state labels.
pub fn read_dataset_from<R: Read>(reader: R, dag: &Dag) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.len() != dag.len() {
        return Err(Error::Parse {
            line: 1,
            reason: format!("expected {} columns, found {}", dag.len(), header.len()),
        });
    }
    let columns = header
        .iter()
        .map(|name| dag.index_of(name))
        .collect::<Result<Vec<_>>>()?;
    let mut seen = vec![false; dag.len()];
    for &c in &columns {
        if std::mem::replace(&mut seen[c], true) {
            return Err(Error::DuplicateVariable(dag.name(c).to_string()));
        }
    }
    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        if row.len() != columns.len() {
            return Err(Error::Parse {
                line: i + 2,
                reason: format!("expected {} cells, found {}", columns.len(), row.len()),
            });
        }
        let mut rec = vec![0usize; dag.len()];
        for (&v, cell) in columns.iter().zip(row.iter()) {
            rec[v] = dag
                .variable(v)
                .state_index(cell)
                .ok_or_else(|| Error::UnknownState {
                    variable: dag.name(v).to_string(),
                    state: cell.to_string(),
                })?;
        }
        records.push(rec);
    }
    Ok(Dataset::new(records))
}

pub fn write_dataset_to<W: Write>(writer: W, dag: &Dag, data: &Dataset) -> Result<()> {
    data.validate(dag)?;
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(dag.variables().iter().map(|v| v.name.as_str()))?;
    for rec in &data.records {
        wtr.write_record(
            rec.iter()
                .enumerate()
                .map(|(v, &s)| dag.variable(v).states[s].as_str()),
        )?;
    }
    wtr.flush().map_err(|e| Error::io("<dataset>", e))
}

pub fn read_dataset(path: impl AsRef<Path>, dag: &Dag) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset_from(std::io::BufReader::new(file), dag)
}

pub fn write_dataset(path: impl AsRef<Path>, dag: &Dag, data: &Dataset) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_dataset_to(std::io::BufWriter::new(file), dag, data)
}
