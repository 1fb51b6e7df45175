//! Neural understudy of a discrete Bayesian network.
//!
//! The crate bundles the exact machinery for discrete Bayesian networks
//! (forward sampling, variable elimination, smoothed maximum likelihood,
//! d-separation) with a masked feed-forward network that learns to answer
//! arbitrary conditional queries from samples, optionally guided by the
//! independence relations read off the network's DAG.
//!
//! Module map:
//!
//! * [`bn`] - networks, sampling, exact inference, parameter fitting, file formats.
//! * [`dsep`] - d-separation and enumeration of pairwise independence relations.
//! * [`nn`] - the masked MLP, its analytic gradients, Adam and checkpoints.
//! * [`understudy`] - masking, regularisation and evidence-corruption training.
//! * [`eval`] - query sets and MAE scoring.
//! * [`experiments`] - seeded sweeps, DAG perturbation and CSV reports.

pub mod bn;
pub mod dsep;
pub mod error;
pub mod eval;
pub mod experiments;
pub mod nn;
pub mod rng;
pub mod understudy;

pub use error::{Error, Result};
