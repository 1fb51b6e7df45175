mod common;

use std::collections::BTreeMap;

use common::{asia, data_dir, random_dag};
use proptest::prelude::*;
use understudy::bn::{fit_mle_k2, Dag};
use understudy::eval::evaluate;
use understudy::experiments::{
    build_query_sets, emit_reports, legal_perturbations, perturb_dag, perturb_variants, read_runs_csv, run_robustness,
    run_robustness_on, run_sweep, run_sweep_on, summarize, training_data, write_runs_csv, DagMode, DagVariant,
    ExperimentConfig, ModelKind, RUNS_HEADER,
};
use understudy::rng::seeded;

/// Kahn's algorithm on the raw edge list.
fn is_acyclic(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut indeg = vec![0; n];
    for &(_, c) in edges {
        indeg[c] += 1;
    }
    let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = ready.pop() {
        seen += 1;
        for &(p, c) in edges {
            if p == v {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.push(c);
                }
            }
        }
    }
    seen == n
}

/// Small, fast configuration: two epochs, 50 sample queries.
fn quick(models: &[ModelKind], sizes: &[usize], seeds: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(data_dir().join("asia.json"));
    cfg.models = models.to_vec();
    cfg.train_sizes = sizes.to_vec();
    cfg.seeds = (0..seeds).collect();
    cfg.train.epochs = Some(2);
    cfg.train.hidden = Some(8);
    cfg.sample_queries = 50;
    cfg
}

fn csv_bytes(records: &[understudy::experiments::RunRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    write_runs_csv(&mut out, records).unwrap();
    out
}

#[test]
fn asia_perturbations_change_one_edge() {
    let net = asia();
    let dag = net.dag();
    let mut r = seeded(1);
    for _ in 0..20 {
        let removed = perturb_dag(dag, DagMode::Remove, &mut r).unwrap();
        assert_eq!(removed.edges().len(), 7);
        assert!(removed.edges().iter().all(|e| dag.edges().contains(e)));
        let added = perturb_dag(dag, DagMode::Add, &mut r).unwrap();
        assert_eq!(added.edges().len(), 9);
        assert!(is_acyclic(added.len(), added.edges()));
        assert!(dag.edges().iter().all(|e| added.edges().contains(e)));
    }
    assert_eq!(legal_perturbations(dag, DagMode::Remove).unwrap().len(), 8);
}

#[test]
fn two_node_chain_has_no_legal_addition() {
    let dag = Dag::from_indices(common::binary_vars(2), vec![(0, 1)]).unwrap();
    assert!(perturb_dag(&dag, DagMode::Add, &mut seeded(0)).is_err());
    let empty = Dag::from_indices(common::binary_vars(2), vec![]).unwrap();
    assert!(perturb_dag(&empty, DagMode::Remove, &mut seeded(0)).is_err());
    assert!(perturb_variants(&dag, DagMode::Remove, 2, &mut seeded(0)).is_err());
}

#[test]
fn every_variant_changes_the_relation_count() {
    let net = asia();
    let mut cfg = ExperimentConfig::new("unused");
    cfg.dag_variants.count = 5;
    let variants = DagVariant::all(net.dag(), &cfg).unwrap();
    assert_eq!(variants.len(), 11);
    let base = variants[0].relations.len();
    assert_eq!(base, 191);
    for v in &variants[1..] {
        assert_ne!(v.relations.len(), base, "{}", v.id);
    }
    let ids: Vec<&str> = variants.iter().map(|v| v.id.as_str()).collect();
    assert_eq!(ids[..3], ["base", "remove-00", "remove-01"]);
}

#[test]
fn sweep_cardinalities() {
    let one = run_sweep(&quick(&[ModelKind::Bn], &[100], 1)).unwrap();
    assert_eq!(one.len(), 1);
    let cfg = quick(&ModelKind::ALL, &[5, 10, 20, 30, 40], 10);
    let all = run_sweep(&cfg).unwrap();
    assert_eq!(all.len(), 200);
    for r in &all {
        assert!((0.0..=1.0).contains(&r.total_mae) && (0.0..=1.0).contains(&r.sample_mae));
        assert_eq!(r.dag_variant, "base");
        assert_eq!(r.runtime_s, 0.0);
    }
}

#[test]
fn robustness_cardinalities() {
    let models = [ModelKind::Bn, ModelKind::NnReg, ModelKind::NnCor];
    let mut cfg = quick(&models, &[100], 5);
    cfg.dag_variants.modes = vec![];
    assert_eq!(run_robustness(&cfg).unwrap().len(), 15);
    cfg.dag_variants.modes = vec![DagMode::Remove];
    let records = run_robustness(&cfg).unwrap();
    let miss = records.iter().filter(|r| r.dag_mode == DagMode::Remove).count();
    assert_eq!(miss, 75);
    for m in models {
        let n = records.iter().filter(|r| r.model == m && r.dag_mode == DagMode::Remove).count();
        assert_eq!(n, 25);
    }
    // plain NN is the control and runs only on the base structure
    cfg.models = vec![ModelKind::Nn];
    let control = run_robustness(&cfg).unwrap();
    assert!(control.iter().all(|r| r.dag_mode == DagMode::Base));
}

#[test]
fn reports_are_deterministic_and_order_free() {
    let mut cfg = quick(&ModelKind::ALL, &[30], 2);
    cfg.dag_variants.count = 2;
    let a = csv_bytes(&run_robustness(&cfg).unwrap());
    let b = csv_bytes(&run_robustness(&cfg).unwrap());
    assert_eq!(a, b);
    cfg.jobs = 3;
    assert_eq!(csv_bytes(&run_robustness(&cfg).unwrap()), a);
    assert!(String::from_utf8(a).unwrap().starts_with(RUNS_HEADER));
}

#[test]
fn bn_record_matches_an_independent_fit() {
    let net = asia();
    let cfg = quick(&[ModelKind::Bn], &[60], 3);
    let records = run_sweep_on(&net, &cfg).unwrap();
    let sets = build_query_sets(&net, cfg.query_seed, cfg.sample_queries).unwrap();
    for r in &records {
        let data = training_data(&net, 60, r.seed).unwrap();
        assert_eq!(data, training_data(&net, 60, r.seed).unwrap());
        let fitted = fit_mle_k2(net.dag(), &data).unwrap();
        assert_eq!(evaluate(&fitted, &sets.total).unwrap().mean, r.total_mae);
        assert_eq!(evaluate(&fitted, &sets.sample).unwrap().mean, r.sample_mae);
    }
    // different seeds and sizes give different data
    assert_ne!(training_data(&net, 60, 0).unwrap(), training_data(&net, 60, 1).unwrap());
}

#[test]
fn summary_recomputes_from_runs_csv() {
    let net = asia();
    let mut cfg = quick(&[ModelKind::Bn, ModelKind::NnCor], &[20, 40], 4);
    cfg.dag_variants.modes = vec![DagMode::Add];
    cfg.dag_variants.count = 2;
    let records = run_robustness_on(&net, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (runs, summary) = emit_reports(&records, dir.path().join("out")).unwrap();
    let back = read_runs_csv(std::fs::File::open(&runs).unwrap()).unwrap();
    assert_eq!(back, records);

    let mut groups: BTreeMap<(String, usize, String), Vec<f64>> = BTreeMap::new();
    for r in &back {
        groups
            .entry((r.model.to_string(), r.train_size, r.dag_mode.to_string()))
            .or_default()
            .push(r.total_mae);
    }
    let rows = summarize(&records);
    assert_eq!(rows.len(), groups.len());
    for row in &rows {
        let xs = &groups[&(row.model.to_string(), row.train_size, row.dag_mode.to_string())];
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert_eq!(row.n, xs.len());
        assert!((row.total_mae_mean - mean).abs() < 1e-12);
        assert!((row.total_mae_ci_high - mean - 1.96 * sd / n.sqrt()).abs() < 1e-12);
    }
    let text = std::fs::read_to_string(summary).unwrap();
    assert_eq!(text.lines().count(), rows.len() + 1);
}

#[test]
fn config_file_paths_resolve_against_the_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(data_dir().join("asia.json"), dir.path().join("asia.json")).unwrap();
    let path = dir.path().join("c.toml");
    std::fs::write(
        &path,
        "network = \"asia.json\"\ntrain_sizes = [10]\nseeds = [0]\nmodels = [\"BN\"]\nsample_queries = 5\noutput_dir = \"out\"\n",
    )
    .unwrap();
    let cfg = ExperimentConfig::read(&path).unwrap();
    assert_eq!(cfg.network, dir.path().join("asia.json"));
    assert_eq!(cfg.output_dir.as_deref(), Some(dir.path().join("out").as_path()));
    assert_eq!(run_sweep(&cfg).unwrap().len(), 1);
    assert!(ExperimentConfig::from_toml("network = \"x\"\nbogus = 1\n").is_err());
    assert!(ExperimentConfig::from_toml("network = \"x\"\ntrain_sizes = []\n").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn perturbations_are_valid(seed in any::<u64>(), n in 2usize..8, density in 0.1f64..0.9) {
        let mut r = seeded(seed);
        let dag = random_dag(&mut r, n, density);
        let e = dag.edges().len();
        for mode in [DagMode::Remove, DagMode::Add] {
            match perturb_dag(&dag, mode, &mut r) {
                Ok(d) => {
                    let want = if mode == DagMode::Remove { e - 1 } else { e + 1 };
                    prop_assert_eq!(d.edges().len(), want);
                    prop_assert!(is_acyclic(n, d.edges()));
                }
                Err(_) => {
                    // only when nothing is legal
                    prop_assert!(legal_perturbations(&dag, mode).unwrap().is_empty());
                    if mode == DagMode::Remove {
                        prop_assert_eq!(e, 0);
                    }
                }
            }
        }
    }
}

#[test]
fn shipped_configs_parse() {
    let root = data_dir().join("../configs");
    for name in ["sweep.toml", "robustness.toml"] {
        let cfg = ExperimentConfig::read(root.join(name)).unwrap();
        assert!(cfg.network.exists(), "{name}");
    }
    let sweep = ExperimentConfig::read(root.join("sweep.toml")).unwrap();
    assert_eq!(sweep.train_sizes.len(), 8);
    assert_eq!(sweep.train_config(), understudy::understudy::TrainConfig::default());
    let rob = ExperimentConfig::read(root.join("robustness.toml")).unwrap();
    assert_eq!(rob.dag_variants.modes, vec![DagMode::Remove, DagMode::Add]);
}
