use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub states: Vec<String>,
}

impl VariableSpec {
    pub fn new(name: impl Into<String>, states: &[&str]) -> Self {
        VariableSpec {
            name: name.into(),
            states: states.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Variable with states `"0"`, `"1"`, ...
    pub fn with_cardinality(name: impl Into<String>, n: usize) -> Self {
        VariableSpec {
            name: name.into(),
            states: (0..n).map(|i| i.to_string()).collect(),
        }
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }
}

/// Directed acyclic graph over declared variables.
///
/// Variables are addressed by their declaration index everywhere in the
/// crate. Parent lists are kept sorted by declaration index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    variables: Vec<VariableSpec>,
    edges: Vec<(usize, usize)>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    index: HashMap<String, usize>,
}

impl Dag {
    /// Build from edges given by variable name.
    pub fn new(variables: Vec<VariableSpec>, edges: &[(String, String)]) -> Result<Self> {
        let index = Self::index_variables(&variables)?;
        let lookup = |name: &String| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownVariable(name.clone()))
        };
        let edges = edges
            .iter()
            .map(|(p, c)| Ok((lookup(p)?, lookup(c)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::build(variables, edges, index)
    }

    /// Build from edges given by declaration index.
    pub fn from_indices(variables: Vec<VariableSpec>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let index = Self::index_variables(&variables)?;
        if let Some(&(p, c)) = edges
            .iter()
            .find(|&&(p, c)| p >= variables.len() || c >= variables.len())
        {
            return Err(Error::UnknownVariable(format!("#{}", p.max(c))));
        }
        Self::build(variables, edges, index)
    }

    fn index_variables(variables: &[VariableSpec]) -> Result<HashMap<String, usize>> {
        let mut index = HashMap::with_capacity(variables.len());
        for (i, v) in variables.iter().enumerate() {
            if v.states.len() < 2 {
                return Err(Error::InvalidVariable {
                    variable: v.name.clone(),
                    reason: "needs at least two states".into(),
                });
            }
            for (j, s) in v.states.iter().enumerate() {
                if v.states[..j].contains(s) {
                    return Err(Error::InvalidVariable {
                        variable: v.name.clone(),
                        reason: format!("duplicate state `{s}`"),
                    });
                }
            }
            if index.insert(v.name.clone(), i).is_some() {
                return Err(Error::DuplicateVariable(v.name.clone()));
            }
        }
        Ok(index)
    }

    fn build(
        variables: Vec<VariableSpec>,
        edges: Vec<(usize, usize)>,
        index: HashMap<String, usize>,
    ) -> Result<Self> {
        let n = variables.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for &(p, c) in &edges {
            if p == c {
                return Err(Error::SelfLoop(variables[p].name.clone()));
            }
            if parents[c].contains(&p) {
                return Err(Error::DuplicateEdge(
                    variables[p].name.clone(),
                    variables[c].name.clone(),
                ));
            }
            parents[c].push(p);
            children[p].push(c);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        let dag = Dag {
            variables,
            edges,
            parents,
            children,
            index,
        };
        if let Some(v) = dag.find_cycle() {
            return Err(Error::Cycle(dag.variables[v].name.clone()));
        }
        Ok(dag)
    }

    /// A node that remains after Kahn's algorithm stalls, if any.
    fn find_cycle(&self) -> Option<usize> {
        let order = self.kahn();
        if order.len() == self.len() {
            return None;
        }
        (0..self.len()).find(|v| !order.contains(v))
    }

    /// Kahn's algorithm, always taking the lowest-index ready node.
    fn kahn(&self) -> Vec<usize> {
        let n = self.len();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut done = vec![false; n];
        let mut order = Vec::with_capacity(n);
        while let Some(v) = (0..n).find(|&v| !done[v] && indegree[v] == 0) {
            done[v] = true;
            order.push(v);
            for &c in &self.children[v] {
                indegree[c] -= 1;
            }
        }
        order
    }

    /// Parents before children; ties broken by declaration order.
    pub fn topological_order(&self) -> Vec<usize> {
        self.kahn()
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn variable(&self, v: usize) -> &VariableSpec {
        &self.variables[v]
    }

    pub fn name(&self, v: usize) -> &str {
        &self.variables[v].name
    }

    pub fn cardinality(&self, v: usize) -> usize {
        self.variables[v].cardinality()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Edges in insertion order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, parent: usize, child: usize) -> bool {
        self.parents[child].contains(&parent)
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// True if `to` is reachable from `from` along directed edges.
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            if std::mem::replace(&mut seen[v], true) {
                continue;
            }
            stack.extend(&self.children[v]);
        }
        false
    }

    /// Same variables with a different edge list.
    pub fn with_edges(&self, edges: Vec<(usize, usize)>) -> Result<Dag> {
        Self::build(self.variables.clone(), edges, self.index.clone())
    }

    /// Edges as `(parent, child)` names.
    pub fn named_edges(&self) -> Vec<(String, String)> {
        self.edges
            .iter()
            .map(|&(p, c)| (self.name(p).to_string(), self.name(c).to_string()))
            .collect()
    }
}
