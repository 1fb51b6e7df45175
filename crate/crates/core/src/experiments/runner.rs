use std::time::Instant;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{perturb_variants, DagMode, ExperimentConfig, ModelKind};
use crate::bn::io::read_network;
use crate::bn::{fit_mle_k2, forward_sample, Dag, Dataset, DiscreteBayesNet};
use crate::dsep::{enumerate_relations, IndependenceRelation};
use crate::eval::{build_sample_query_set, build_total_query_set, evaluate, Predictor, QuerySet};
use crate::nn::Layout;
use crate::rng::{self, stream};
use crate::understudy::{train_new, TrainConfig};
use crate::{Error, Result};

/// Outcome of one (model, size, seed, DAG variant) run; one row of `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub model: ModelKind,
    pub strategy: String,
    pub train_size: usize,
    pub seed: u64,
    pub dag_variant: String,
    pub dag_mode: DagMode,
    pub total_mae: f64,
    pub sample_mae: f64,
    pub fallback_count: usize,
    pub runtime_s: f64,
}

impl RunRecord {
    fn sort_key(&self) -> (DagMode, &str, ModelKind, usize, u64) {
        (self.dag_mode, &self.dag_variant, self.model, self.train_size, self.seed)
    }

    fn label(model: ModelKind, size: usize, seed: u64, variant: &str) -> String {
        format!("{model} size={size} seed={seed} dag={variant}")
    }
}

/// Evaluation sets, built once per experiment.
#[derive(Debug, Clone)]
pub struct QuerySets {
    pub total: QuerySet,
    pub sample: QuerySet,
}

pub fn build_query_sets(truth: &DiscreteBayesNet, query_seed: u64, sample_count: usize) -> Result<QuerySets> {
    Ok(QuerySets {
        total: build_total_query_set(truth)?,
        sample: build_sample_query_set(
            truth,
            &mut rng::derive(query_seed, stream::QUERY_SET, &[]),
            sample_count,
        )?,
    })
}

/// A structure handed to the DAG-consuming models.
#[derive(Debug, Clone)]
pub struct DagVariant {
    /// `base`, or `<mode>-<index>` with a two-digit index.
    pub id: String,
    pub mode: DagMode,
    pub dag: Dag,
    pub relations: Vec<IndependenceRelation>,
}

impl DagVariant {
    pub fn base(dag: &Dag) -> Self {
        DagVariant {
            id: DagMode::Base.to_string(),
            mode: DagMode::Base,
            dag: dag.clone(),
            relations: enumerate_relations(dag),
        }
    }

    /// The base structure followed by the configured perturbations.
    pub fn all(dag: &Dag, config: &ExperimentConfig) -> Result<Vec<DagVariant>> {
        let spec = &config.dag_variants;
        let mut out = vec![Self::base(dag)];
        for &mode in spec.modes.iter().filter(|&&m| m != DagMode::Base) {
            let mut rng = rng::derive(spec.seed, stream::DAG_VARIANT, &[mode as u64]);
            for (i, d) in perturb_variants(dag, mode, spec.count, &mut rng)?.into_iter().enumerate() {
                out.push(DagVariant {
                    id: format!("{mode}-{i:02}"),
                    mode,
                    relations: enumerate_relations(&d),
                    dag: d,
                });
            }
        }
        Ok(out)
    }
}

/// Training set for `(size, seed)`, shared by every model of that cell.
pub fn training_data(truth: &DiscreteBayesNet, size: usize, seed: u64) -> Result<Dataset> {
    let mut data = forward_sample(truth, &mut rng::derive(seed, stream::DATA, &[size as u64]), size)?;
    data.seed = Some(seed);
    Ok(data)
}

/// Seed of the neural training streams for `(size, seed)`; shared by the
/// three neural models so they start from the same weights and masks.
pub fn train_seed(size: usize, seed: u64) -> u64 {
    rng::derive(seed, stream::TRAIN, &[size as u64]).next_u64()
}

struct Job<'a> {
    model: ModelKind,
    size: usize,
    seed: u64,
    variant: &'a DagVariant,
}

struct Context<'a> {
    truth: &'a DiscreteBayesNet,
    queries: &'a QuerySets,
    train: TrainConfig,
    record_runtime: bool,
}

impl Context<'_> {
    fn run(&self, job: &Job<'_>) -> Result<RunRecord> {
        let start = Instant::now();
        let data = training_data(self.truth, job.size, job.seed)?;
        let (total, sample) = match job.model.strategy() {
            None => {
                let bn = fit_mle_k2(&job.variant.dag, &data)?;
                self.score(&bn)?
            }
            Some(strategy) => {
                let cfg = TrainConfig {
                    strategy,
                    seed: train_seed(job.size, job.seed),
                    ..self.train.clone()
                };
                let layout = Layout::from_dag(self.truth.dag());
                let (model, _) = train_new(layout, &data, &cfg, &job.variant.relations)?;
                self.score(&model)?
            }
        };
        Ok(RunRecord {
            model: job.model,
            strategy: job.model.strategy_label().to_string(),
            train_size: job.size,
            seed: job.seed,
            dag_variant: job.variant.id.clone(),
            dag_mode: job.variant.mode,
            total_mae: total.0,
            sample_mae: sample.0,
            fallback_count: total.1 + sample.1,
            runtime_s: if self.record_runtime {
                start.elapsed().as_secs_f64()
            } else {
                0.0
            },
        })
    }

    fn score<P: Predictor>(&self, p: &P) -> Result<((f64, usize), (f64, usize))> {
        let t = evaluate(p, &self.queries.total)?;
        let s = evaluate(p, &self.queries.sample)?;
        Ok(((t.mean, t.fallback_count), (s.mean, s.fallback_count)))
    }
}

fn execute(
    truth: &DiscreteBayesNet,
    config: &ExperimentConfig,
    jobs: Vec<Job<'_>>,
) -> Result<Vec<RunRecord>> {
    let queries = build_query_sets(truth, config.query_seed, config.sample_queries)?;
    let ctx = Context {
        truth,
        queries: &queries,
        train: config.train_config(),
        record_runtime: config.record_runtime,
    };
    let run = |job: &Job<'_>| {
        ctx.run(job).map_err(|e| Error::Run {
            run: RunRecord::label(job.model, job.size, job.seed, &job.variant.id),
            source: Box::new(e),
        })
    };
    let mut records = if config.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
        pool.install(|| jobs.par_iter().map(run).collect::<Result<Vec<_>>>())?
    } else {
        jobs.iter().map(run).collect::<Result<Vec<_>>>()?
    };
    records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(records)
}

/// Sample-efficiency sweep on the correct DAG: every requested model for
/// every (size, seed), on a shared training set per cell.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let truth = read_network(&config.network)?;
    run_sweep_on(&truth, config)
}

pub fn run_sweep_on(truth: &DiscreteBayesNet, config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let base = DagVariant::base(truth.dag());
    let mut jobs = Vec::new();
    for &size in &config.train_sizes {
        for &seed in &config.seeds {
            for &model in &config.models {
                jobs.push(Job {
                    model,
                    size,
                    seed,
                    variant: &base,
                });
            }
        }
    }
    execute(truth, config, jobs)
}

/// Misspecification study: data always comes from the correct network, the
/// DAG-consuming models get each variant. Plain NN runs on `base` only.
pub fn run_robustness(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let truth = read_network(&config.network)?;
    run_robustness_on(&truth, config)
}

pub fn run_robustness_on(truth: &DiscreteBayesNet, config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let variants = DagVariant::all(truth.dag(), config)?;
    let mut jobs = Vec::new();
    for variant in &variants {
        for &size in &config.train_sizes {
            for &seed in &config.seeds {
                for &model in &config.models {
                    if model.uses_dag() || variant.mode == DagMode::Base {
                        jobs.push(Job {
                            model,
                            size,
                            seed,
                            variant,
                        });
                    }
                }
            }
        }
    }
    execute(truth, config, jobs)
}
