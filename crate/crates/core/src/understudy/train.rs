use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cor::{applicable_relations, corruption_passes};
use super::mask::{encode, sample_mask};
use super::reg::{add_reg_pairs, draw_reg_pairs};
use super::UnderstudyModel;
use crate::bn::Dataset;
use crate::dsep::IndependenceRelation;
use crate::nn::{Layout, MaskedInstance, Objective, OptimizerState, DEFAULT_HIDDEN};
use crate::rng::{self, stream};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Plain,
    Reg,
    Cor,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Plain => "plain",
            Strategy::Reg => "reg",
            Strategy::Cor => "cor",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Strategy::Plain),
            "reg" => Ok(Strategy::Reg),
            "cor" => Ok(Strategy::Cor),
            other => Err(Error::invalid(format!("unknown strategy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub strategy: Strategy,
    /// Weight of the regularisation term.
    pub alpha: f64,
    pub reg_batch_size: usize,
    pub hidden: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 500,
            batch_size: 16,
            learning_rate: 0.001,
            strategy: Strategy::Plain,
            alpha: 10.0,
            reg_batch_size: 16,
            hidden: DEFAULT_HIDDEN,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self, relations: &[IndependenceRelation]) -> Result<()> {
        if self.batch_size == 0 || self.reg_batch_size == 0 || self.hidden == 0 {
            return Err(Error::invalid("batch sizes and hidden width must be positive"));
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::invalid("alpha must be a finite non-negative number"));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::invalid("learning rate must be positive"));
        }
        if self.strategy != Strategy::Plain && relations.is_empty() {
            return Err(Error::invalid(format!(
                "strategy `{}` needs a non-empty relation list",
                self.strategy
            )));
        }
        Ok(())
    }
}

/// Per-epoch training statistics.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    /// Mean cross-entropy over the epoch's samples.
    pub target_loss: Vec<f64>,
    /// Mean regularisation term over the epoch's batches (reg only).
    pub reg_loss: Vec<f64>,
    /// Samples whose split matched at least one relation (cor only).
    pub corrupted_samples: Vec<usize>,
}

/// Initialise a model from the config's seed and train it.
pub fn train_new(
    layout: Layout,
    data: &Dataset,
    config: &TrainConfig,
    relations: &[IndependenceRelation],
) -> Result<(UnderstudyModel, TrainHistory)> {
    let model = UnderstudyModel::init(
        layout,
        config.hidden,
        &mut rng::derive(config.seed, stream::INIT, &[]),
    )?;
    train(model, data, config, relations)
}

/// Run `config.epochs` epochs of minibatch Adam.
///
/// Every epoch reshuffles the samples and draws a fresh split for each
/// one. `reg` adds `alpha` times the violation of one uniformly drawn
/// relation per batch; `cor` replaces each sample by its corruption passes,
/// each sample still carrying unit weight.
pub fn train(
    mut model: UnderstudyModel,
    data: &Dataset,
    config: &TrainConfig,
    relations: &[IndependenceRelation],
) -> Result<(UnderstudyModel, TrainHistory)> {
    config.validate(relations)?;
    if data.is_empty() {
        return Err(Error::invalid("training needs at least one sample"));
    }
    let layout = model.layout.clone();
    let n = layout.variables();
    for rec in &data.records {
        if rec.len() != n {
            return Err(Error::invalid("dataset does not match the model layout"));
        }
    }

    let mut mask_rng = rng::derive(config.seed, stream::MASKING, &[]);
    let mut reg_rng = rng::derive(config.seed, stream::REGULARISATION, &[]);
    let mut cor_rng = rng::derive(config.seed, stream::CORRUPTION, &[]);
    let mut opt = OptimizerState::new(&model.params, config.learning_rate);
    let mut history = TrainHistory::default();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut batch: Vec<(MaskedInstance, f64)> = Vec::with_capacity(2 * config.batch_size);

    for _ in 0..config.epochs {
        order.shuffle(&mut mask_rng);
        let mut epoch_ce = 0.0;
        let mut epoch_reg = 0.0;
        let mut batches = 0usize;
        let mut corrupted = 0usize;
        for chunk in order.chunks(config.batch_size) {
            let b = chunk.len() as f64;
            batch.clear();
            for &i in chunk {
                let sample = &data.records[i];
                let split = sample_mask(n, &mut mask_rng)?;
                let weight = 1.0 / (b * split.targets().count() as f64);
                if config.strategy == Strategy::Cor {
                    if !applicable_relations(&split, relations).is_empty() {
                        corrupted += 1;
                    }
                    for inst in corruption_passes(sample, &split, relations, &layout, &mut cor_rng)? {
                        batch.push((inst, weight));
                    }
                } else {
                    batch.push((encode(sample, &split, &layout)?, weight));
                }
            }

            let mut obj = Objective::new(&model.params, &layout);
            let mut batch_ce = 0.0;
            for (inst, w) in &batch {
                batch_ce += w * obj.add_cross_entropy(inst, *w);
            }
            if config.strategy == Strategy::Reg {
                let rel = &relations[reg_rng.gen_range(0..relations.len())];
                let pairs = draw_reg_pairs(rel, &layout, &mut reg_rng, config.reg_batch_size)?;
                epoch_reg += add_reg_pairs(&mut obj, &pairs, config.alpha);
            }
            let (_, grads) = obj.finish();
            opt.step(&mut model.params, &grads)?;
            epoch_ce += batch_ce * b;
            batches += 1;
        }
        history.target_loss.push(epoch_ce / data.len() as f64);
        if config.strategy == Strategy::Reg {
            history.reg_loss.push(epoch_reg / batches as f64);
        }
        if config.strategy == Strategy::Cor {
            history.corrupted_samples.push(corrupted);
        }
    }
    Ok((model, history))
}
