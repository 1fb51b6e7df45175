//! Training the network to answer conditional queries: dynamic masking,
//! the plain objective, independence regularisation and evidence
//! corruption.

mod cor;
mod mask;
mod model;
mod reg;
mod train;

pub use cor::{applicable_relations, corruption_passes, Applicable};
pub use mask::{encode, sample_mask, MaskSplit};
pub use model::UnderstudyModel;
pub use reg::{draw_reg_pairs, mean_violation, reg_term, RegPair};
pub use train::{train, train_new, Strategy, TrainConfig, TrainHistory};
