use rand::Rng;

use super::{Dataset, DiscreteBayesNet};
use crate::{Error, Result};

/// Index drawn from a probability vector by inversion.
pub(crate) fn draw_categorical<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding left `u` past the last bucket
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

/// Ancestral sampling: each variable drawn in topological order from the
/// CPT row selected by its already-sampled parents.
pub fn forward_sample<R: Rng + ?Sized>(
    net: &DiscreteBayesNet,
    rng: &mut R,
    count: usize,
) -> Result<Dataset> {
    if count == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let order = net.dag().topological_order();
    let records = (0..count)
        .map(|_| {
            let mut sample = vec![0usize; net.len()];
            for &v in &order {
                let cpt = net.cpt(v);
                sample[v] = draw_categorical(cpt.row(cpt.row_index(&sample)), rng);
            }
            sample
        })
        .collect();
    Ok(Dataset::new(records))
}
