use super::{Field, Layout, MaskedInstance, ModelParams};
use crate::{Error, Result};

/// Floor applied to probabilities inside the log of the cross-entropy.
pub(crate) const LOG_FLOOR: f64 = 1e-12;

/// Activations of one pass, kept for the backward sweep.
#[derive(Debug, Clone)]
struct Cache {
    x: Vec<f64>,
    z1: Vec<f64>,
    z2: Vec<f64>,
    p: Vec<f64>,
}

impl Cache {
    fn new(k: usize, h: usize) -> Self {
        Cache {
            x: vec![0.0; k],
            z1: vec![0.0; h],
            z2: vec![0.0; h],
            p: vec![0.0; k],
        }
    }
}

#[derive(Debug, Clone)]
struct Scratch {
    dlogits: Vec<f64>,
    dz2: Vec<f64>,
    dz1: Vec<f64>,
}

#[inline]
fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators so the loop vectorises
    let mut acc = [0.0f64; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `out = bias + sum_i input[i] * rows[i]`, rows of width `out.len()`.
#[inline]
fn affine(out: &mut [f64], bias: &[f64], rows: &[f64], input: &[f64]) {
    out.copy_from_slice(bias);
    let w = out.len();
    for (i, &xi) in input.iter().enumerate() {
        if xi != 0.0 {
            axpy(out, xi, &rows[i * w..(i + 1) * w]);
        }
    }
}

/// `tanh` through a single `exp`; absolute error near machine epsilon.
#[inline]
fn fast_tanh(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    ((1.0 - e) / (1.0 + e)).copysign(x)
}

/// Per-variable softmax of `logits`, in place.
fn softmax_slots(layout: &Layout, logits: &mut [f64]) {
    for v in 0..layout.variables() {
        let slot = &mut logits[layout.slot(v)];
        let max = slot.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        for x in slot.iter_mut() {
            *x = (*x - max).exp();
            z += *x;
        }
        for x in slot.iter_mut() {
            *x /= z;
        }
    }
}

/// Backward through a softmax slot: `dlogit = p * (dp - <p, dp>)`.
#[inline]
fn softmax_backward(p: &[f64], dp: &[f64], dlogit: &mut [f64]) {
    let inner: f64 = p.iter().zip(dp).map(|(a, b)| a * b).sum();
    for ((d, &pi), &dpi) in dlogit.iter_mut().zip(p).zip(dp) {
        *d = pi * (dpi - inner);
    }
}

/// `v0`: per-variable softmax of the output layer applied to `u`.
pub fn compute_v0(params: &ModelParams, layout: &Layout) -> Vec<f64> {
    let mut v0 = vec![0.0; params.k()];
    affine(
        &mut v0,
        params.field(Field::B3),
        params.field(Field::W3),
        params.field(Field::U),
    );
    softmax_slots(layout, &mut v0);
    v0
}

/// Output vector for one instance: per-variable distributions at target
/// slots, input one-hots at evidence slots.
pub fn forward(params: &ModelParams, layout: &Layout, instance: &MaskedInstance) -> Vec<f64> {
    let obj = Objective::new(params, layout);
    let mut cache = Cache::new(params.k(), params.hidden());
    obj.run(instance, &mut cache);
    let mut out = cache.p;
    for v in (0..layout.variables()).filter(|&v| instance.evidence[v]) {
        let slot = layout.slot(v);
        out[slot.clone()].fill(0.0);
        out[slot.start + instance.values[v]] = 1.0;
    }
    out
}

/// Batch mean of the per-instance mean cross-entropy over loss-masked
/// variables, with its exact gradient.
pub fn loss_and_grads(
    params: &ModelParams,
    layout: &Layout,
    batch: &[MaskedInstance],
) -> Result<(f64, ModelParams)> {
    if batch.is_empty() {
        return Err(Error::invalid("empty batch"));
    }
    let mut obj = Objective::new(params, layout);
    let b = batch.len() as f64;
    for inst in batch {
        let t = inst.loss_targets();
        if t == 0 {
            return Err(Error::invalid("instance without loss targets"));
        }
        obj.add_cross_entropy(inst, 1.0 / (b * t as f64));
    }
    Ok(obj.finish())
}

/// Accumulates weighted loss terms and their gradients for one parameter
/// snapshot. `v0` is computed once on construction and its gradient is
/// folded back into `w3`, `b3` and `u` by [`finish`](Self::finish).
pub struct Objective<'a> {
    params: &'a ModelParams,
    layout: &'a Layout,
    v0: Vec<f64>,
    grads: ModelParams,
    dv0: Vec<f64>,
    loss: f64,
    a: Cache,
    b: Cache,
    scratch: Scratch,
}

impl<'a> Objective<'a> {
    pub fn new(params: &'a ModelParams, layout: &'a Layout) -> Self {
        debug_assert_eq!(params.k(), layout.width());
        let (k, h) = (params.k(), params.hidden());
        Objective {
            params,
            layout,
            v0: compute_v0(params, layout),
            grads: ModelParams::zeros(k, h),
            dv0: vec![0.0; k],
            loss: 0.0,
            a: Cache::new(k, h),
            b: Cache::new(k, h),
            scratch: Scratch {
                dlogits: vec![0.0; k],
                dz2: vec![0.0; h],
                dz1: vec![0.0; h],
            },
        }
    }

    pub fn v0(&self) -> &[f64] {
        &self.v0
    }

    pub fn loss(&self) -> f64 {
        self.loss
    }

    fn run(&self, inst: &MaskedInstance, cache: &mut Cache) {
        let p = self.params;
        let layout = self.layout;
        for v in 0..layout.variables() {
            let slot = layout.slot(v);
            if inst.evidence[v] {
                cache.x[slot.clone()].fill(0.0);
                cache.x[slot.start + inst.values[v]] = 1.0;
            } else {
                cache.x[slot.clone()].copy_from_slice(&self.v0[slot]);
            }
        }
        affine(&mut cache.z1, p.field(Field::B1), p.field(Field::W1), &cache.x);
        cache.z1.iter_mut().for_each(|x| *x = fast_tanh(*x));
        affine(&mut cache.z2, p.field(Field::B2), p.field(Field::W2), &cache.z1);
        cache.z2.iter_mut().for_each(|x| *x = fast_tanh(*x));
        affine(&mut cache.p, p.field(Field::B3), p.field(Field::W3), &cache.z2);
        softmax_slots(layout, &mut cache.p);
    }

    /// Accumulate parameter gradients for `dlogits` at the output of a pass.
    fn backward(
        params: &ModelParams,
        layout: &Layout,
        grads: &mut ModelParams,
        dv0: &mut [f64],
        cache: &Cache,
        evidence: &[bool],
        scratch: &mut Scratch,
    ) {
        let (k, h) = (params.k(), params.hidden());
        let dlogits = &scratch.dlogits;

        let r = grads.range(Field::B3);
        axpy(&mut grads.as_mut_slice()[r], 1.0, dlogits);
        let w3 = params.field(Field::W3);
        let r = grads.range(Field::W3);
        let gw3 = &mut grads.as_mut_slice()[r];
        for i in 0..h {
            let row = i * k..(i + 1) * k;
            axpy(&mut gw3[row.clone()], cache.z2[i], dlogits);
            let d = dot(&w3[row], dlogits);
            scratch.dz2[i] = d * (1.0 - cache.z2[i] * cache.z2[i]);
        }

        let r = grads.range(Field::B2);
        axpy(&mut grads.as_mut_slice()[r], 1.0, &scratch.dz2);
        let w2 = params.field(Field::W2);
        let r = grads.range(Field::W2);
        let gw2 = &mut grads.as_mut_slice()[r];
        for i in 0..h {
            let row = i * h..(i + 1) * h;
            axpy(&mut gw2[row.clone()], cache.z1[i], &scratch.dz2);
            let d = dot(&w2[row], &scratch.dz2);
            scratch.dz1[i] = d * (1.0 - cache.z1[i] * cache.z1[i]);
        }

        let r = grads.range(Field::B1);
        axpy(&mut grads.as_mut_slice()[r], 1.0, &scratch.dz1);
        let w1 = params.field(Field::W1);
        let r = grads.range(Field::W1);
        let gw1 = &mut grads.as_mut_slice()[r];
        for i in 0..k {
            if cache.x[i] != 0.0 {
                axpy(&mut gw1[i * h..(i + 1) * h], cache.x[i], &scratch.dz1);
            }
        }
        // only target slots were fed from v0; evidence one-hots are constants
        for v in (0..layout.variables()).filter(|&v| !evidence[v]) {
            for i in layout.slot(v) {
                dv0[i] += dot(&w1[i * h..(i + 1) * h], &scratch.dz1);
            }
        }
    }

    /// Add `weight * sum_{loss-masked X} -log p(X = observed)` and return
    /// the unweighted sum.
    pub fn add_cross_entropy(&mut self, inst: &MaskedInstance, weight: f64) -> f64 {
        let mut cache = std::mem::replace(&mut self.a, Cache::new(0, 0));
        self.run(inst, &mut cache);
        let layout = self.layout;
        self.scratch.dlogits.fill(0.0);
        let mut raw = 0.0;
        for v in (0..layout.variables()).filter(|&v| inst.loss[v]) {
            let slot = layout.slot(v);
            let observed = slot.start + inst.values[v];
            let p_obs = cache.p[observed];
            raw -= p_obs.max(LOG_FLOOR).ln();
            if p_obs >= LOG_FLOOR {
                for i in slot {
                    self.scratch.dlogits[i] = weight * cache.p[i];
                }
                self.scratch.dlogits[observed] -= weight;
            }
        }
        self.loss += weight * raw;
        Self::backward(
            self.params,
            layout,
            &mut self.grads,
            &mut self.dv0,
            &cache,
            &inst.evidence,
            &mut self.scratch,
        );
        self.a = cache;
        raw
    }

    /// Add `weight * (1/n) sum_j (p_a(X=j) - p_b(X=j))^2` for variable
    /// `target` under the two instances, and return the unweighted term.
    pub fn add_squared_difference(
        &mut self,
        a: &MaskedInstance,
        b: &MaskedInstance,
        target: usize,
        weight: f64,
    ) -> f64 {
        let mut ca = std::mem::replace(&mut self.a, Cache::new(0, 0));
        let mut cb = std::mem::replace(&mut self.b, Cache::new(0, 0));
        self.run(a, &mut ca);
        self.run(b, &mut cb);
        let slot = self.layout.slot(target);
        let n = slot.len() as f64;
        let diff: Vec<f64> = slot.clone().map(|i| ca.p[i] - cb.p[i]).collect();
        let term = diff.iter().map(|d| d * d).sum::<f64>() / n;
        self.loss += weight * term;

        let dp: Vec<f64> = diff.iter().map(|d| weight * 2.0 / n * d).collect();
        for (cache, sign, inst) in [(&ca, 1.0, a), (&cb, -1.0, b)] {
            self.scratch.dlogits.fill(0.0);
            let signed: Vec<f64> = dp.iter().map(|d| sign * d).collect();
            softmax_backward(
                &cache.p[slot.clone()],
                &signed,
                &mut self.scratch.dlogits[slot.clone()],
            );
            Self::backward(
                self.params,
                self.layout,
                &mut self.grads,
                &mut self.dv0,
                cache,
                &inst.evidence,
                &mut self.scratch,
            );
        }
        self.a = ca;
        self.b = cb;
        term
    }

    /// Total weighted loss and its gradient.
    pub fn finish(mut self) -> (f64, ModelParams) {
        let (k, h) = (self.params.k(), self.params.hidden());
        let mut dlogit0 = vec![0.0; k];
        for v in 0..self.layout.variables() {
            let slot = self.layout.slot(v);
            softmax_backward(
                &self.v0[slot.clone()],
                &self.dv0[slot.clone()],
                &mut dlogit0[slot],
            );
        }
        let u = self.params.field(Field::U);
        let w3 = self.params.field(Field::W3);
        let mut du = vec![0.0; h];
        for i in 0..h {
            du[i] = dot(&w3[i * k..(i + 1) * k], &dlogit0);
        }
        let r = self.grads.range(Field::W3);
        let gw3 = &mut self.grads.as_mut_slice()[r];
        for i in 0..h {
            axpy(&mut gw3[i * k..(i + 1) * k], u[i], &dlogit0);
        }
        let r = self.grads.range(Field::B3);
        axpy(&mut self.grads.as_mut_slice()[r], 1.0, &dlogit0);
        let r = self.grads.range(Field::U);
        axpy(&mut self.grads.as_mut_slice()[r], 1.0, &du);
        (self.loss, self.grads)
    }
}
