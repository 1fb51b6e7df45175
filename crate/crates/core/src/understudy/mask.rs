use rand::Rng;

use crate::nn::{Layout, MaskedInstance};
use crate::{Error, Result};

/// Partition of the variables into evidence and targets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MaskSplit {
    evidence: Vec<bool>,
}

impl MaskSplit {
    /// Split with the given evidence variables; everything else is a target.
    pub fn with_evidence(n: usize, evidence: &[usize]) -> Result<Self> {
        let mut mask = vec![false; n];
        for &v in evidence {
            if v >= n {
                return Err(Error::UnknownVariable(format!("#{v}")));
            }
            mask[v] = true;
        }
        if mask.iter().all(|&e| e) {
            return Err(Error::invalid("a split needs at least one target"));
        }
        Ok(MaskSplit { evidence: mask })
    }

    pub fn len(&self) -> usize {
        self.evidence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.evidence.is_empty()
    }

    pub fn is_evidence(&self, v: usize) -> bool {
        self.evidence[v]
    }

    pub fn evidence_mask(&self) -> &[bool] {
        &self.evidence
    }

    pub fn evidence(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&v| self.evidence[v])
    }

    pub fn targets(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&v| !self.evidence[v])
    }

    pub fn evidence_count(&self) -> usize {
        self.evidence.iter().filter(|&&e| e).count()
    }
}

/// Evidence size uniform over `0..n`, then a uniform subset of that size.
pub fn sample_mask<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<MaskSplit> {
    if n < 2 {
        return Err(Error::invalid("masking needs at least two variables"));
    }
    let m = rng.gen_range(0..n);
    let evidence = rand::seq::index::sample(rng, n, m).into_vec();
    MaskSplit::with_evidence(n, &evidence)
}

/// One-hot instance for `sample` under `split`, scoring every target.
pub fn encode(sample: &[usize], split: &MaskSplit, layout: &Layout) -> Result<MaskedInstance> {
    if sample.len() != split.len() {
        return Err(Error::invalid("sample and split disagree on the variable count"));
    }
    let inst = MaskedInstance::new(
        sample.to_vec(),
        split.evidence_mask().to_vec(),
        split.evidence_mask().iter().map(|e| !e).collect(),
    )?;
    inst.validate(layout)?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn forced_boundaries() {
        let none = MaskSplit::with_evidence(4, &[]).unwrap();
        assert_eq!(none.targets().count(), 4);
        let one_target = MaskSplit::with_evidence(4, &[0, 1, 3]).unwrap();
        assert_eq!(one_target.targets().collect::<Vec<_>>(), vec![2]);
        assert!(MaskSplit::with_evidence(2, &[0, 1]).is_err());
        assert!(MaskSplit::with_evidence(2, &[4]).is_err());
    }

    #[test]
    fn evidence_size_is_uniform() {
        let mut r = rng::seeded(11);
        let draws = 100_000;
        let mut counts = [0usize; 7];
        for _ in 0..draws {
            counts[sample_mask(7, &mut r).unwrap().evidence_count()] += 1;
        }
        for c in counts {
            let f = c as f64 / draws as f64;
            assert!((f - 1.0 / 7.0).abs() < 0.01, "{counts:?}");
        }
    }

    #[test]
    fn encode_marks_targets_for_loss() {
        let layout = Layout::new(vec!["x1".into(), "x2".into(), "x3".into()], vec![2, 2, 2]).unwrap();
        let split = MaskSplit::with_evidence(3, &[0, 1]).unwrap();
        let inst = encode(&[1, 0, 1], &split, &layout).unwrap();
        assert_eq!(inst.evidence, vec![true, true, false]);
        assert_eq!(inst.loss, vec![false, false, true]);
        assert_eq!(inst.one_hot(&layout), vec![0.0, 1.0, 1.0, 0.0, 0.0, 1.0]);
        let all = encode(&[1, 0, 1], &MaskSplit::with_evidence(3, &[]).unwrap(), &layout).unwrap();
        assert_eq!(all.loss, vec![true; 3]);
        assert!(encode(&[1, 0, 2], &split, &layout).is_err());
    }
}
