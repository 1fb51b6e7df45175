//! Reference implementations shared by the integration tests. None of them
//! reuse the library's inference or graph algorithms.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use understudy::bn::io::read_network;
use understudy::bn::{Assignment, Dag, Dataset, DiscreteBayesNet, VariableSpec};
use understudy::nn::Layout;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn asia() -> DiscreteBayesNet {
    read_network(data_dir().join("asia.json")).expect("asia network loads")
}

/// Every full state vector of the network, last variable fastest.
pub fn all_states(cards: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &c in cards {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (0..c).map(move |s| {
                    let mut p = prefix.clone();
                    p.push(s);
                    p
                })
            })
            .collect();
    }
    out
}

/// `P(target | evidence)` by summing the joint over all full states;
/// `None` when the evidence has zero mass.
pub fn brute_posterior(net: &DiscreteBayesNet, evidence: &Assignment, target: usize) -> Option<Vec<f64>> {
    let cards: Vec<usize> = (0..net.len()).map(|v| net.dag().cardinality(v)).collect();
    let mut acc = vec![0.0; cards[target]];
    for state in all_states(&cards) {
        if evidence.iter().all(|(v, s)| state[v] == s) {
            // product of CPT cells, read straight from the tables
            let mut p = 1.0;
            for v in 0..net.len() {
                let cpt = net.cpt(v);
                let mut row = 0;
                for &par in cpt.parents() {
                    row = row * cards[par] + state[par];
                }
                p *= cpt.table()[row * cards[v] + state[v]];
            }
            acc[state[target]] += p;
        }
    }
    let z: f64 = acc.iter().sum();
    (z > 0.0).then(|| acc.into_iter().map(|a| a / z).collect())
}

/// d-separation by enumerating every simple undirected path between `x`
/// and `y` and checking each for a blocking node.
pub fn path_dsep(dag: &Dag, x: usize, y: usize, given: &[usize]) -> bool {
    let n = dag.len();
    let edges = dag.edges();
    let is_edge = |a: usize, b: usize| edges.contains(&(a, b));
    let mut descendants = vec![vec![false; n]; n];
    for (v, row) in descendants.iter_mut().enumerate() {
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &(p, c) in edges {
                if p == u && !row[c] {
                    row[c] = true;
                    stack.push(c);
                }
            }
        }
    }
    let observed = |v: usize| given.contains(&v);
    let opens_collider = |v: usize| observed(v) || (0..n).any(|d| descendants[v][d] && observed(d));

    let mut open_path_found = false;
    let mut path = vec![x];
    fn walk(
        path: &mut Vec<usize>,
        y: usize,
        n: usize,
        adjacent: &dyn Fn(usize, usize) -> bool,
        on_path: &mut dyn FnMut(&[usize]),
    ) {
        let last = *path.last().unwrap();
        if last == y {
            on_path(path);
            return;
        }
        for next in 0..n {
            if !path.contains(&next) && adjacent(last, next) {
                path.push(next);
                walk(path, y, n, adjacent, on_path);
                path.pop();
            }
        }
    }
    let adjacent = |a: usize, b: usize| is_edge(a, b) || is_edge(b, a);
    walk(&mut path, y, n, &adjacent, &mut |p: &[usize]| {
        let blocked = (1..p.len() - 1).any(|i| {
            let (a, m, b) = (p[i - 1], p[i], p[i + 1]);
            let collider = is_edge(a, m) && is_edge(b, m);
            if collider {
                !opens_collider(m)
            } else {
                observed(m)
            }
        });
        if !blocked {
            open_path_found = true;
        }
    });
    !open_path_found
}

/// Random DAG on `n` binary variables: a random order, each forward pair
/// joined with probability `density`.
pub fn random_dag<R: Rng>(rng: &mut R, n: usize, density: f64) -> Dag {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                edges.push((order[i], order[j]));
            }
        }
    }
    Dag::from_indices(binary_vars(n), edges).unwrap()
}

pub fn binary_vars(n: usize) -> Vec<VariableSpec> {
    (0..n).map(|i| VariableSpec::with_cardinality(format!("v{i}"), 2)).collect()
}

/// The two-variable dataset with counts n00 = 10, n01 = 30, n10 = 20,
/// n11 = 40 (first index X, second Y).
pub fn two_variable_data() -> (Layout, Dataset) {
    let layout = Layout::new(vec!["x".into(), "y".into()], vec![2, 2]).unwrap();
    let mut records = Vec::new();
    for (x, y, count) in [(0, 0, 10), (0, 1, 30), (1, 0, 20), (1, 1, 40)] {
        records.extend(std::iter::repeat(vec![x, y]).take(count));
    }
    (layout, Dataset::new(records))
}

pub fn assignment(pairs: &[(usize, usize)]) -> Assignment {
    pairs.iter().copied().collect()
}

/// Which loss terms a gradient-check batch exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradKind {
    /// Random splits, the first instance forced to empty evidence.
    Plain,
    /// Corruption passes under relations of a random DAG.
    Corrupted,
    /// Cross-entropy plus a weighted independence-violation term.
    Regularised,
}

/// Result of one finite-difference comparison.
pub struct GradCase {
    pub kind: GradKind,
    pub report: understudy::nn::gradcheck::GradCheckReport,
    pub had_empty_evidence: bool,
    pub passes: usize,
}

/// Random layout, parameters and batch of `kind`, checked at step 1e-5.
pub fn gradient_case(seed: u64, kind: GradKind) -> GradCase {
    use understudy::dsep::enumerate_relations;
    use understudy::nn::gradcheck::check_gradients;
    use understudy::nn::{MaskedInstance, ModelParams, Objective};
    use understudy::rng::seeded;
    use understudy::understudy::{corruption_passes, draw_reg_pairs, encode, sample_mask, MaskSplit};

    let mut r = seeded(seed);
    let n = r.gen_range(2..=5);
    let widths: Vec<usize> = (0..n).map(|_| r.gen_range(2..=3)).collect();
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let layout = Layout::new(names.clone(), widths.clone()).unwrap();
    let h = r.gen_range(3..=8);
    let mut params = ModelParams::init(&layout, h, &mut r).unwrap();
    // move biases and u off their initial values so every block matters
    for x in params.as_mut_slice() {
        *x += r.gen_range(-0.3..0.3);
    }
    let vars: Vec<VariableSpec> = names
        .iter()
        .zip(&widths)
        .map(|(nm, &w)| VariableSpec::with_cardinality(nm.clone(), w))
        .collect();
    let shape = random_dag(&mut r, n, 0.4);
    let dag = Dag::from_indices(vars, shape.edges().to_vec()).unwrap();
    let relations = enumerate_relations(&dag);

    let sample = |r: &mut understudy::rng::Rng| -> Vec<usize> { widths.iter().map(|&w| r.gen_range(0..w)).collect() };
    let batch_len = r.gen_range(2..=5);
    let mut instances: Vec<MaskedInstance> = Vec::new();
    let mut pairs = Vec::new();
    for i in 0..batch_len {
        let s = sample(&mut r);
        let split = if i == 0 && kind == GradKind::Plain {
            MaskSplit::with_evidence(n, &[]).unwrap()
        } else {
            sample_mask(n, &mut r).unwrap()
        };
        match kind {
            GradKind::Corrupted if !relations.is_empty() => {
                instances.extend(corruption_passes(&s, &split, &relations, &layout, &mut r).unwrap());
            }
            _ => instances.push(encode(&s, &split, &layout).unwrap()),
        }
    }
    if kind == GradKind::Regularised {
        let rel = if relations.is_empty() {
            understudy::dsep::IndependenceRelation::new(0, 1, []).unwrap()
        } else {
            relations[r.gen_range(0..relations.len())].clone()
        };
        pairs = draw_reg_pairs(&rel, &layout, &mut r, 4).unwrap();
    }
    let had_empty_evidence = instances.iter().any(|i| i.evidence.iter().all(|e| !e));
    let weights: Vec<f64> = instances.iter().map(|i| 1.0 / (batch_len * i.loss_targets()) as f64).collect();
    let alpha = 3.0;
    let f = |p: &ModelParams| -> (f64, ModelParams) {
        let mut obj = Objective::new(p, &layout);
        for (inst, &w) in instances.iter().zip(&weights) {
            obj.add_cross_entropy(inst, w);
        }
        for pair in &pairs {
            obj.add_squared_difference(&pair.first, &pair.second, pair.target, alpha / pairs.len() as f64);
        }
        obj.finish()
    };
    let (_, analytic) = f(&params);
    let report = check_gradients(&params, &analytic, 1e-5, |p| f(p).0);
    GradCase {
        kind,
        report,
        had_empty_evidence,
        passes: instances.len(),
    }
}

/// The 20 cases used by the gradient checks: plain, corrupted and
/// regularised batches in rotation.
pub fn gradient_cases() -> Vec<GradCase> {
    let kinds = [GradKind::Plain, GradKind::Corrupted, GradKind::Regularised];
    (0..20).map(|i| gradient_case(1000 + i as u64, kinds[i % 3])).collect()
}

/// The six closed-form quantities for the two-variable dataset, in the
/// order `P(y=1|x=0)`, `P(y=1|x=1)`, `P(x=1|y=0)`, `P(x=1|y=1)`,
/// `P(x=1)`, `P(y=1)`, paired with the model's predictions.
pub fn two_variable_quantities(model: &understudy::understudy::UnderstudyModel) -> Vec<(&'static str, f64, f64)> {
    let p1 = |ev: &[(usize, usize)], target: usize| model.predict(&assignment(ev), &[target]).unwrap()[0].probs[1];
    vec![
        ("y|x=0", 30.0 / 40.0, p1(&[(0, 0)], 1)),
        ("y|x=1", 40.0 / 60.0, p1(&[(0, 1)], 1)),
        ("x|y=0", 20.0 / 30.0, p1(&[(1, 0)], 0)),
        ("x|y=1", 40.0 / 70.0, p1(&[(1, 1)], 0)),
        ("x", 0.6, p1(&[], 0)),
        ("y", 0.7, p1(&[], 1)),
    ]
}

/// Random network on `n` binary variables with CPT entries in (0.01, 0.99).
pub fn random_network(seed: u64, n: usize) -> DiscreteBayesNet {
    use understudy::bn::{build_network, CptSpec};
    let mut r = understudy::rng::seeded(seed);
    let dag = random_dag(&mut r, n, 0.5);
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let cpts: Vec<CptSpec> = (0..n)
        .map(|v| {
            let parents = dag.parents(v).to_vec();
            let rows = (0..1usize << parents.len())
                .map(|_| {
                    let p: f64 = r.gen_range(0.01..0.99);
                    vec![p, 1.0 - p]
                })
                .collect();
            CptSpec {
                variable: names[v].clone(),
                parents: parents.iter().map(|&p| names[p].clone()).collect(),
                rows,
            }
        })
        .collect();
    build_network(binary_vars(n), &dag.named_edges(), &cpts).unwrap()
}
