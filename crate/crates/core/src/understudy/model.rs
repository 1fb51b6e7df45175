use rand::Rng;

use crate::bn::{Assignment, Distribution};
use super::TrainConfig;
use crate::nn::{self, Checkpoint, Layout, MaskedInstance, ModelParams};
use crate::{Error, Result};

/// A network together with the slot layout it was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct UnderstudyModel {
    pub layout: Layout,
    pub params: ModelParams,
}

impl UnderstudyModel {
    pub fn init<R: Rng + ?Sized>(layout: Layout, hidden: usize, rng: &mut R) -> Result<Self> {
        let params = ModelParams::init(&layout, hidden, rng)?;
        Ok(UnderstudyModel { layout, params })
    }

    pub fn from_checkpoint(ckpt: &Checkpoint) -> Result<Self> {
        Ok(UnderstudyModel {
            layout: ckpt.layout()?,
            params: ckpt.params()?,
        })
    }

    /// Checkpoint recording the training configuration alongside the weights.
    pub fn to_checkpoint(&self, config: &TrainConfig) -> Result<Checkpoint> {
        Ok(Checkpoint::new(
            &self.layout,
            &self.params,
            config.seed,
            serde_json::to_value(config)?,
        ))
    }

    /// Query instance: evidence one-hots, every other variable a target.
    pub fn query_instance(&self, evidence: &Assignment) -> Result<MaskedInstance> {
        let n = self.layout.variables();
        let mut values = vec![0; n];
        let mut mask = vec![false; n];
        for (v, s) in evidence.iter() {
            if v >= n {
                return Err(Error::UnknownVariable(format!("#{v}")));
            }
            values[v] = s;
            mask[v] = true;
        }
        let loss = mask.iter().map(|e| !e).collect();
        let inst = MaskedInstance::new(values, mask, loss)?;
        inst.validate(&self.layout)?;
        Ok(inst)
    }

    /// Predicted distribution of each target given the evidence.
    pub fn predict(&self, evidence: &Assignment, targets: &[usize]) -> Result<Vec<Distribution>> {
        let inst = self.query_instance(evidence)?;
        let out = nn::forward(&self.params, &self.layout, &inst);
        targets
            .iter()
            .map(|&t| {
                if t >= self.layout.variables() {
                    return Err(Error::UnknownVariable(format!("#{t}")));
                }
                if evidence.contains(t) {
                    return Err(Error::TargetInEvidence(self.layout.names()[t].clone()));
                }
                Ok(Distribution {
                    variable: t,
                    probs: out[self.layout.slot(t)].to_vec(),
                })
            })
            .collect()
    }
}
