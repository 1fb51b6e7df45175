use rand::Rng;

use crate::dsep::IndependenceRelation;
use crate::nn::{Layout, MaskedInstance, ModelParams, Objective};
use crate::{Error, Result};

/// Two query instances that differ only in the value of `Y`, sharing a
/// random instantiation of the conditioning set.
#[derive(Debug, Clone, PartialEq)]
pub struct RegPair {
    pub first: MaskedInstance,
    pub second: MaskedInstance,
    /// The variable whose prediction must not change (`X`).
    pub target: usize,
}

/// `count` draws for `X ⊥ Y | A`: each conditioning variable uniform over
/// its states, `y != y'` uniform.
pub fn draw_reg_pairs<R: Rng + ?Sized>(
    relation: &IndependenceRelation,
    layout: &Layout,
    rng: &mut R,
    count: usize,
) -> Result<Vec<RegPair>> {
    let n = layout.variables();
    let (x, y) = (relation.x, relation.y);
    if x >= n || y >= n || relation.given.iter().any(|&a| a >= n) {
        return Err(Error::invalid("relation refers to variables outside the layout"));
    }
    let card_y = layout.widths()[y];
    if card_y < 2 {
        return Err(Error::invalid("the varied variable needs at least two states"));
    }
    let mut evidence = vec![false; n];
    evidence[y] = true;
    for &a in &relation.given {
        evidence[a] = true;
    }
    let loss = vec![false; n];
    (0..count)
        .map(|_| {
            let mut values = vec![0usize; n];
            for &a in &relation.given {
                values[a] = rng.gen_range(0..layout.widths()[a]);
            }
            let y1 = rng.gen_range(0..card_y);
            let mut y2 = rng.gen_range(0..card_y - 1);
            if y2 >= y1 {
                y2 += 1;
            }
            let mut second = values.clone();
            values[y] = y1;
            second[y] = y2;
            Ok(RegPair {
                first: MaskedInstance::new(values, evidence.clone(), loss.clone())?,
                second: MaskedInstance::new(second, evidence.clone(), loss.clone())?,
                target: x,
            })
        })
        .collect()
}

/// Add `weight * mean_d (1/n) sum_j (p_d(x_j|a,y) - p_d(x_j|a,y'))^2`
/// to `obj`; returns the unweighted mean.
pub(crate) fn add_reg_pairs(obj: &mut Objective<'_>, pairs: &[RegPair], weight: f64) -> f64 {
    let per = weight / pairs.len() as f64;
    pairs
        .iter()
        .map(|p| obj.add_squared_difference(&p.first, &p.second, p.target, per))
        .sum::<f64>()
        / pairs.len() as f64
}

/// Violation of one relation by the model, averaged over
/// `reg_batch_size` random instantiations.
pub fn reg_term<R: Rng + ?Sized>(
    params: &ModelParams,
    layout: &Layout,
    relation: &IndependenceRelation,
    rng: &mut R,
    reg_batch_size: usize,
) -> Result<f64> {
    if reg_batch_size == 0 {
        return Err(Error::invalid("regularisation batch size must be at least 1"));
    }
    let pairs = draw_reg_pairs(relation, layout, rng, reg_batch_size)?;
    let mut obj = Objective::new(params, layout);
    Ok(add_reg_pairs(&mut obj, &pairs, 1.0))
}

/// Mean violation over all `relations`, each at `per_relation` draws.
pub fn mean_violation<R: Rng + ?Sized>(
    params: &ModelParams,
    layout: &Layout,
    relations: &[IndependenceRelation],
    rng: &mut R,
    per_relation: usize,
) -> Result<f64> {
    if relations.is_empty() {
        return Err(Error::invalid("no relations"));
    }
    let mut total = 0.0;
    for r in relations {
        total += reg_term(params, layout, r, rng, per_relation)?;
    }
    Ok(total / relations.len() as f64)
}
