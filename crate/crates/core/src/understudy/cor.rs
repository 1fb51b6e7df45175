use std::collections::BTreeMap;

use rand::Rng;

use super::MaskSplit;
use crate::dsep::IndependenceRelation;
use crate::nn::{Layout, MaskedInstance};
use crate::Result;

/// A relation that applies to a split: the prediction for `protect` must
/// not depend on the evidence variable `corrupt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Applicable {
    pub relation: usize,
    pub protect: usize,
    pub corrupt: usize,
}

/// Relations `X ⊥ Y | A` with `{Y} ∪ A = E` and `X` a target (protect `X`,
/// corrupt `Y`), or symmetrically `{X} ∪ A = E` and `Y` a target.
pub fn applicable_relations(split: &MaskSplit, relations: &[IndependenceRelation]) -> Vec<Applicable> {
    let e_count = split.evidence_count();
    let mut out = Vec::new();
    for (i, r) in relations.iter().enumerate() {
        // |{Y} ∪ A| = |A| + 1 must equal |E|, and A ⊆ E
        if r.given.len() + 1 != e_count || !r.given.iter().all(|&a| split.is_evidence(a)) {
            continue;
        }
        let (x_ev, y_ev) = (split.is_evidence(r.x), split.is_evidence(r.y));
        if y_ev && !x_ev {
            out.push(Applicable {
                relation: i,
                protect: r.x,
                corrupt: r.y,
            });
        } else if x_ev && !y_ev {
            out.push(Applicable {
                relation: i,
                protect: r.y,
                corrupt: r.x,
            });
        }
    }
    out
}

/// Expand one sample into the passes needed for evidence corruption.
///
/// Targets are grouped by the set of evidence variables that matched
/// relations mark irrelevant for them. Each group gets one instance with
/// those evidence values re-drawn uniformly and a loss mask over exactly
/// the group. Targets without a match share the clean instance.
pub fn corruption_passes<R: Rng + ?Sized>(
    sample: &[usize],
    split: &MaskSplit,
    relations: &[IndependenceRelation],
    layout: &Layout,
    rng: &mut R,
) -> Result<Vec<MaskedInstance>> {
    let n = split.len();
    let mut irrelevant: Vec<Vec<usize>> = vec![Vec::new(); n];
    for a in applicable_relations(split, relations) {
        irrelevant[a.protect].push(a.corrupt);
    }
    let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for t in split.targets() {
        let mut pattern = std::mem::take(&mut irrelevant[t]);
        pattern.sort_unstable();
        pattern.dedup();
        groups.entry(pattern).or_default().push(t);
    }
    groups
        .into_iter()
        .map(|(pattern, targets)| {
            let mut values = sample.to_vec();
            for &v in &pattern {
                values[v] = rng.gen_range(0..layout.widths()[v]);
            }
            let mut loss = vec![false; n];
            for t in targets {
                loss[t] = true;
            }
            let inst = MaskedInstance::new(values, split.evidence_mask().to_vec(), loss)?;
            inst.validate(layout)?;
            Ok(inst)
        })
        .collect()
}
