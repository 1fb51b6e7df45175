//! d-separation and the pairwise independence relations implied by a DAG.

use std::fmt;

use itertools::Itertools;

use crate::bn::Dag;
use crate::{Error, Result};

/// `x ⊥ y | given`, with `x < y` in declaration order and `given` sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndependenceRelation {
    pub x: usize,
    pub y: usize,
    pub given: Vec<usize>,
}

impl IndependenceRelation {
    /// Canonicalising constructor.
    pub fn new(a: usize, b: usize, given: impl IntoIterator<Item = usize>) -> Result<Self> {
        if a == b {
            return Err(Error::invalid("relation needs two distinct variables"));
        }
        let mut given: Vec<usize> = given.into_iter().collect();
        given.sort_unstable();
        given.dedup();
        if given.contains(&a) || given.contains(&b) {
            return Err(Error::invalid(
                "conditioning set must not contain the related variables",
            ));
        }
        Ok(IndependenceRelation {
            x: a.min(b),
            y: a.max(b),
            given,
        })
    }

    /// Displayable form with variable names, `X _|_ Y | {A,B}`.
    pub fn display<'a>(&'a self, dag: &'a Dag) -> RelationDisplay<'a> {
        RelationDisplay {
            rel: self,
            dag,
            braces: true,
        }
    }

    /// Relation-file line, `X _|_ Y | A,B`.
    pub fn to_line(&self, dag: &Dag) -> String {
        RelationDisplay {
            rel: self,
            dag,
            braces: false,
        }
        .to_string()
    }
}

pub struct RelationDisplay<'a> {
    rel: &'a IndependenceRelation,
    dag: &'a Dag,
    braces: bool,
}

impl fmt::Display for RelationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let given = self.rel.given.iter().map(|&v| self.dag.name(v)).join(",");
        write!(
            f,
            "{} _|_ {} |",
            self.dag.name(self.rel.x),
            self.dag.name(self.rel.y)
        )?;
        match (self.braces, given.is_empty()) {
            (true, _) => write!(f, " {{{given}}}"),
            (false, true) => Ok(()),
            (false, false) => write!(f, " {given}"),
        }
    }
}

/// Reachability ("Bayes-ball") test: is every trail between `x` and `y`
/// blocked by `given`?
pub fn is_d_separated(dag: &Dag, x: usize, y: usize, given: &[usize]) -> Result<bool> {
    let n = dag.len();
    for &v in [x, y].iter().chain(given) {
        if v >= n {
            return Err(Error::UnknownVariable(format!("#{v}")));
        }
    }
    if x == y {
        return Err(Error::invalid("d-separation needs two distinct variables"));
    }
    if given.contains(&x) || given.contains(&y) {
        return Err(Error::invalid(
            "conditioning set must not contain the queried variables",
        ));
    }
    Ok(!reachable(dag, x, given)[y])
}

/// Nodes with an active trail from `source` given `observed`.
fn reachable(dag: &Dag, source: usize, observed: &[usize]) -> Vec<bool> {
    let n = dag.len();
    let mut is_observed = vec![false; n];
    for &z in observed {
        is_observed[z] = true;
    }
    // observed nodes and their ancestors: colliders there are open
    let mut opens_collider = vec![false; n];
    let mut stack: Vec<usize> = observed.to_vec();
    while let Some(v) = stack.pop() {
        if !std::mem::replace(&mut opens_collider[v], true) {
            stack.extend(dag.parents(v));
        }
    }

    const UP: usize = 0; // arrived from a child
    const DOWN: usize = 1; // arrived from a parent
    let mut visited = vec![[false; 2]; n];
    let mut reached = vec![false; n];
    let mut stack = vec![(source, UP)];
    while let Some((v, dir)) = stack.pop() {
        if std::mem::replace(&mut visited[v][dir], true) {
            continue;
        }
        if !is_observed[v] {
            reached[v] = true;
        }
        if dir == UP && !is_observed[v] {
            stack.extend(dag.parents(v).iter().map(|&p| (p, UP)));
            stack.extend(dag.children(v).iter().map(|&c| (c, DOWN)));
        } else if dir == DOWN {
            if !is_observed[v] {
                stack.extend(dag.children(v).iter().map(|&c| (c, DOWN)));
            }
            if opens_collider[v] {
                stack.extend(dag.parents(v).iter().map(|&p| (p, UP)));
            }
        }
    }
    reached
}

/// Every candidate `(x, y, A)`: pairs in declaration order, then
/// conditioning sets by size and lexicographically. There are
/// `C(N,2) * 2^(N-2)` of them.
pub fn candidates(dag: &Dag) -> impl Iterator<Item = IndependenceRelation> + '_ {
    let n = dag.len();
    (0..n).tuple_combinations().flat_map(move |(x, y)| {
        let rest: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();
        (0..=rest.len()).flat_map(move |k| {
            rest.clone()
                .into_iter()
                .combinations(k)
                .map(move |given| IndependenceRelation { x, y, given })
        })
    })
}

/// All pairwise independence relations implied by `dag`, in the order of
/// [`candidates`].
pub fn enumerate_relations(dag: &Dag) -> Vec<IndependenceRelation> {
    candidates(dag)
        .filter(|r| !reachable(dag, r.x, &r.given)[r.y])
        .collect()
}

/// Parse a relation file: one `X _|_ Y | A1,A2` per line. Braces around
/// the conditioning set are optional; blank lines and `#` comments are
/// skipped.
pub fn parse_relations(text: &str, dag: &Dag) -> Result<Vec<IndependenceRelation>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: &str| Error::Parse {
            line: i + 1,
            reason: reason.to_string(),
        };
        let (x, y) = split_pair(line).ok_or_else(|| bad("expected `X _|_ Y | A`"))?;
        let cond = line
            .splitn(3, '|')
            .nth(2)
            .ok_or_else(|| bad("missing conditioning set"))?
            .trim();
        let cond = cond
            .strip_prefix('{')
            .map(|c| c.strip_suffix('}').ok_or_else(|| bad("unbalanced braces")))
            .transpose()?
            .unwrap_or(cond);
        let lookup = |name: &str| dag.index_of(name.trim()).map_err(|e| bad(&e.to_string()));
        let given = cond
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(lookup)
            .collect::<Result<Vec<_>>>()?;
        let rel = IndependenceRelation::new(lookup(x)?, lookup(y)?, given)
            .map_err(|e| bad(&e.to_string()))?;
        out.push(rel);
    }
    Ok(out)
}

fn split_pair(line: &str) -> Option<(&str, &str)> {
    let (x, rest) = line.split_once("_|_")?;
    let (y, _) = rest.split_once('|')?;
    let (x, y) = (x.trim(), y.trim());
    (!x.is_empty() && !y.is_empty()).then_some((x, y))
}

pub fn relations_to_text(rels: &[IndependenceRelation], dag: &Dag) -> String {
    rels.iter().map(|r| r.to_line(dag) + "\n").collect()
}
