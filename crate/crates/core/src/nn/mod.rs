//! The masked three-layer tanh network.
//!
//! Inputs and outputs are the concatenated one-hot slots of all variables.
//! Target slots of the input are filled from `v0`, the per-variable softmax
//! of the output layer applied to a trainable vector `u`; evidence slots of
//! the output are overwritten by the input one-hots.

mod adam;
mod checkpoint;
mod forward;
pub mod gradcheck;

use std::ops::Range;

use rand::Rng;

use crate::bn::Dag;
use crate::{Error, Result};

pub use adam::OptimizerState;
pub use checkpoint::{Checkpoint, LayoutEntry, ParamsFile};
pub use forward::{compute_v0, forward, loss_and_grads, Objective};

/// Default hidden width.
pub const DEFAULT_HIDDEN: usize = 50;

/// Slot offsets and widths of each variable in the one-hot vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    names: Vec<String>,
    offsets: Vec<usize>,
    widths: Vec<usize>,
    k: usize,
}

impl Layout {
    pub fn new(names: Vec<String>, widths: Vec<usize>) -> Result<Self> {
        if names.len() != widths.len() {
            return Err(Error::invalid("layout needs one width per variable"));
        }
        if names.is_empty() {
            return Err(Error::invalid("layout needs at least one variable"));
        }
        if let Some(i) = widths.iter().position(|&w| w < 2) {
            return Err(Error::InvalidVariable {
                variable: names[i].clone(),
                reason: "needs at least two states".into(),
            });
        }
        let mut offsets = Vec::with_capacity(widths.len());
        let mut k = 0;
        for &w in &widths {
            offsets.push(k);
            k += w;
        }
        Ok(Layout {
            names,
            offsets,
            widths,
            k,
        })
    }

    pub fn from_dag(dag: &Dag) -> Self {
        Self::new(
            dag.variables().iter().map(|v| v.name.clone()).collect(),
            dag.variables().iter().map(|v| v.cardinality()).collect(),
        )
        .expect("DAG variables have at least two states")
    }

    /// Total width `k`.
    pub fn width(&self) -> usize {
        self.k
    }

    pub fn variables(&self) -> usize {
        self.widths.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn offset(&self, v: usize) -> usize {
        self.offsets[v]
    }

    pub fn slot(&self, v: usize) -> Range<usize> {
        self.offsets[v]..self.offsets[v] + self.widths[v]
    }

    /// True when `dag` has the same variables and cardinalities.
    pub fn matches(&self, dag: &Dag) -> bool {
        *self == Self::from_dag(dag)
    }
}

/// Parameter blocks, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    W1,
    B1,
    W2,
    B2,
    W3,
    B3,
    U,
}

impl Field {
    pub const ALL: [Field; 7] = [
        Field::W1,
        Field::B1,
        Field::W2,
        Field::B2,
        Field::W3,
        Field::B3,
        Field::U,
    ];

    fn len(self, k: usize, h: usize) -> usize {
        match self {
            Field::W1 | Field::W3 => k * h,
            Field::W2 => h * h,
            Field::B1 | Field::B2 | Field::U => h,
            Field::B3 => k,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Field::W1 => "w1",
            Field::B1 => "b1",
            Field::W2 => "w2",
            Field::B2 => "b2",
            Field::W3 => "w3",
            Field::B3 => "b3",
            Field::U => "u",
        }
    }
}

/// All trainable values in one flat buffer.
///
/// Weight matrices are row-major with rows indexed by the layer input:
/// `w1` is `k x h`, `w2` is `h x h`, `w3` is `h x k`. The same type holds
/// gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    k: usize,
    h: usize,
    data: Vec<f64>,
}

impl ModelParams {
    pub fn zeros(k: usize, h: usize) -> Self {
        let len = Field::ALL.iter().map(|f| f.len(k, h)).sum();
        ModelParams {
            k,
            h,
            data: vec![0.0; len],
        }
    }

    pub fn zeros_like(other: &ModelParams) -> Self {
        Self::zeros(other.k, other.h)
    }

    /// Glorot-uniform weights, zero biases, `u` uniform in `[-0.1, 0.1]`.
    pub fn init<R: Rng + ?Sized>(layout: &Layout, h: usize, rng: &mut R) -> Result<Self> {
        if h == 0 {
            return Err(Error::invalid("hidden width must be at least 1"));
        }
        let k = layout.width();
        let mut p = Self::zeros(k, h);
        for (field, fan_in, fan_out) in [(Field::W1, k, h), (Field::W2, h, h), (Field::W3, h, k)] {
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for w in p.field_mut(field) {
                *w = rng.gen_range(-bound..=bound);
            }
        }
        for x in p.field_mut(Field::U) {
            *x = rng.gen_range(-0.1..=0.1);
        }
        Ok(p)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn hidden(&self) -> usize {
        self.h
    }

    pub fn range(&self, field: Field) -> Range<usize> {
        let start: usize = Field::ALL
            .iter()
            .take_while(|&&f| f != field)
            .map(|f| f.len(self.k, self.h))
            .sum();
        start..start + field.len(self.k, self.h)
    }

    pub fn field(&self, field: Field) -> &[f64] {
        &self.data[self.range(field)]
    }

    pub fn field_mut(&mut self, field: Field) -> &mut [f64] {
        let r = self.range(field);
        &mut self.data[r]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Weights and biases of the three linear layers.
    pub fn linear_parameter_count(&self) -> usize {
        self.data.len() - self.h
    }

    /// Size of the trainable source vector `u`.
    pub fn source_parameter_count(&self) -> usize {
        self.h
    }

    pub fn parameter_count(&self) -> usize {
        self.data.len()
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, other: &ModelParams, alpha: f64) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        self.data.iter_mut().for_each(|x| *x *= alpha);
    }
}

/// Model input for one training or query pass.
///
/// `values` holds one state per variable (the one-hot encoding is implied);
/// values of non-evidence variables are ignored by the network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedInstance {
    pub values: Vec<usize>,
    pub evidence: Vec<bool>,
    pub loss: Vec<bool>,
}

impl MaskedInstance {
    pub fn new(values: Vec<usize>, evidence: Vec<bool>, loss: Vec<bool>) -> Result<Self> {
        if values.len() != evidence.len() || values.len() != loss.len() {
            return Err(Error::invalid("instance masks must cover every variable"));
        }
        if evidence.iter().zip(&loss).any(|(&e, &l)| e && l) {
            return Err(Error::invalid("loss mask overlaps the evidence"));
        }
        Ok(MaskedInstance {
            values,
            evidence,
            loss,
        })
    }

    /// Concatenated one-hot vector of `values` (all variables).
    pub fn one_hot(&self, layout: &Layout) -> Vec<f64> {
        let mut x = vec![0.0; layout.width()];
        for (v, &s) in self.values.iter().enumerate() {
            x[layout.offset(v) + s] = 1.0;
        }
        x
    }

    pub fn loss_targets(&self) -> usize {
        self.loss.iter().filter(|&&l| l).count()
    }

    pub fn validate(&self, layout: &Layout) -> Result<()> {
        if self.values.len() != layout.variables() {
            return Err(Error::invalid("instance does not match the layout"));
        }
        for (v, &s) in self.values.iter().enumerate() {
            if s >= layout.widths()[v] {
                return Err(Error::StateOutOfRange {
                    variable: layout.names()[v].clone(),
                    index: s,
                    cardinality: layout.widths()[v],
                });
            }
        }
        Ok(())
    }
}
