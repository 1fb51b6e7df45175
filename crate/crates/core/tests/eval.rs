mod common;

use common::{asia, brute_posterior, random_network};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use understudy::bn::{Distribution, DiscreteBayesNet};
use understudy::eval::{
    build_sample_query_set, build_total_query_set, evaluate, query_mae, FnPredictor, QueryKind, MAE_CONVENTION,
};
use understudy::rng::seeded;

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn d(v: usize, probs: &[f64]) -> Distribution {
    Distribution {
        variable: v,
        probs: probs.to_vec(),
    }
}

#[test]
fn asia_total_set_has_every_assignment() {
    let net = asia();
    let set = build_total_query_set(&net).unwrap();
    assert_eq!(set.kind, QueryKind::Total);
    assert_eq!(set.len(), 2059);
    assert_eq!(set.skipped, 0);
    assert_eq!(set.empty_evidence_count(), 1);
    for q in &set.queries {
        assert_eq!(q.targets.len() + q.evidence.len(), 7);
        assert!(q.targets.iter().all(|&t| !q.evidence.contains(t)));
        for (t, truth) in q.targets.iter().zip(&q.truth) {
            assert_eq!(truth.variable, *t);
            assert!((truth.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn truth_matches_enumeration_on_sampled_queries() {
    let net = asia();
    let set = build_sample_query_set(&net, &mut seeded(21), 200).unwrap();
    for q in &set.queries {
        for (t, truth) in q.targets.iter().zip(&q.truth) {
            let want = brute_posterior(&net, &q.evidence, *t).expect("sampled evidence has mass");
            for (a, b) in truth.probs.iter().zip(&want) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn sample_set_size_and_determinism() {
    let net = asia();
    let a = build_sample_query_set(&net, &mut seeded(0), 1000).unwrap();
    let b = build_sample_query_set(&net, &mut seeded(0), 1000).unwrap();
    assert_eq!(a.len(), 1000);
    assert_eq!(a, b);
    assert_ne!(a, build_sample_query_set(&net, &mut seeded(1), 1000).unwrap());
    // evidence size is uniform over 0..7, so about 1000/7 empty queries
    let empty = a.empty_evidence_count();
    assert!((100..190).contains(&empty), "{empty}");
    assert!(build_sample_query_set(&net, &mut seeded(0), 0).is_err());
}

#[test]
fn sampled_evidence_follows_the_joint() {
    // smoke = yes has probability 0.5, asia = yes 0.01
    let net = asia();
    let dag = net.dag();
    let (asia_v, smoke) = (dag.index_of("asia").unwrap(), dag.index_of("smoke").unwrap());
    let set = build_sample_query_set(&net, &mut seeded(3), 1000).unwrap();
    let yes = |v: usize| dag.variable(v).state_index("yes").unwrap();
    let count = |v: usize| {
        let with: Vec<_> = set.queries.iter().filter_map(|q| q.evidence.get(v)).collect();
        (with.iter().filter(|&&s| s == yes(v)).count(), with.len())
    };
    let (asia_yes, asia_n) = count(asia_v);
    let (smoke_yes, smoke_n) = count(smoke);
    assert!((asia_yes as f64) < 0.05 * asia_n as f64);
    let f = smoke_yes as f64 / smoke_n as f64;
    assert!((f - 0.5).abs() < 0.1, "{f}");
}

#[test]
fn ground_truth_scores_zero() {
    let net = asia();
    let total = build_total_query_set(&net).unwrap();
    let report = evaluate(&net, &total).unwrap();
    assert!(report.mean.abs() <= 1e-12);
    assert_eq!(report.fallback_count, 0);
    assert_eq!(report.convention, MAE_CONVENTION);
    assert_eq!(report.per_query.len(), 2059);
}

fn uniform_predictor() -> FnPredictor<impl Fn(&understudy::bn::Assignment, &[usize]) -> understudy::Result<Vec<Distribution>>> {
    FnPredictor(|_: &understudy::bn::Assignment, targets: &[usize]| {
        Ok(targets.iter().map(|&t| Distribution::uniform(t, 2)).collect())
    })
}

#[test]
fn uniform_predictor_scores_distance_from_one_half() {
    let net = asia();
    let total = build_total_query_set(&net).unwrap();
    let report = evaluate(&uniform_predictor(), &total).unwrap();
    let mut want = 0.0;
    for q in &total.queries {
        let per: f64 = q
            .truth
            .iter()
            .map(|t| t.probs.iter().map(|p| (0.5 - p).abs()).sum::<f64>() / 2.0)
            .sum();
        want += per / q.targets.len() as f64;
    }
    want /= total.len() as f64;
    assert!((report.mean - want).abs() < 1e-12);
}

#[test]
fn aggregate_ignores_query_order() {
    let net = asia();
    let mut total = build_total_query_set(&net).unwrap();
    let before = evaluate(&uniform_predictor(), &total).unwrap().mean;
    total.queries.shuffle(&mut seeded(8));
    let after = evaluate(&uniform_predictor(), &total).unwrap().mean;
    assert!((before - after).abs() < 1e-12);
}

#[test]
fn mae_examples() {
    assert!((query_mae(&[d(0, &[0.3, 0.7])], &[d(0, &[0.5, 0.5])]).unwrap() - 0.2).abs() < 1e-12);
    let two = query_mae(&[d(0, &[0.3, 0.7]), d(1, &[0.4, 0.6])], &[d(0, &[0.5, 0.5]), d(1, &[0.4, 0.6])]).unwrap();
    assert!((two - 0.1).abs() < 1e-12);
    assert!(query_mae(&[d(0, &[0.5, 0.5])], &[d(1, &[0.5, 0.5])]).is_err());
    assert!(query_mae(&[], &[]).is_err());
}

fn small_net(n: usize, seed: u64) -> DiscreteBayesNet {
    random_network(seed, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn total_set_size_formula(n in 2usize..=8, seed in any::<u64>()) {
        let set = build_total_query_set(&small_net(n, seed)).unwrap();
        let want: usize = (0..n).map(|m| binomial(n, m) << m).sum();
        prop_assert_eq!(set.len(), want);
        prop_assert_eq!(set.skipped, 0);
    }

    #[test]
    fn binary_mae_is_the_gap_on_one_state(p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
        let m = query_mae(&[d(0, &[1.0 - p, p])], &[d(0, &[1.0 - q, q])]).unwrap();
        prop_assert!((m - (p - q).abs()).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&m));
        prop_assert_eq!(m == 0.0, p == q);
    }

    #[test]
    fn mae_is_bounded(raw in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0), 1..5)) {
        let norm = |a: f64, b: f64, c: f64| {
            let z = a + b + c + 1e-9;
            vec![a / z, b / z, c / z]
        };
        let pred: Vec<_> = raw.iter().enumerate().map(|(i, &(a, b, c))| d(i, &norm(a, b, c))).collect();
        let truth: Vec<_> = raw.iter().enumerate().map(|(i, &(a, b, c))| d(i, &norm(c, a, b))).collect();
        let m = query_mae(&pred, &truth).unwrap();
        prop_assert!((0.0..=1.0).contains(&m));
    }
}
