use super::ModelParams;
use crate::{Error, Result};

/// Adam with bias correction.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl OptimizerState {
    /// Default moments (0.9, 0.999) and epsilon 1e-8.
    pub fn new(params: &ModelParams, learning_rate: f64) -> Self {
        OptimizerState {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            m: vec![0.0; params.parameter_count()],
            v: vec![0.0; params.parameter_count()],
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn step(&mut self, params: &mut ModelParams, grads: &ModelParams) -> Result<()> {
        if grads.parameter_count() != self.m.len() || params.parameter_count() != self.m.len() {
            return Err(Error::invalid("gradient shape does not match the optimiser"));
        }
        self.step += 1;
        let t = self.step as i32;
        let bc1 = 1.0 - self.beta1.powi(t);
        let bc2 = 1.0 - self.beta2.powi(t);
        let step_size = self.learning_rate / bc1;
        let bc2_sqrt = bc2.sqrt();
        let (b1, b2, eps) = (self.beta1, self.beta2, self.epsilon);
        for (((p, &g), m), v) in params
            .as_mut_slice()
            .iter_mut()
            .zip(grads.as_slice())
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            *p -= step_size * *m / ((*v).sqrt() / bc2_sqrt + eps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_is_a_no_op() {
        let mut p = ModelParams::zeros(4, 2);
        p.as_mut_slice().iter_mut().enumerate().for_each(|(i, x)| *x = i as f64);
        let before = p.clone();
        let mut opt = OptimizerState::new(&p, 1e-3);
        opt.step(&mut p, &ModelParams::zeros(4, 2)).unwrap();
        assert_eq!(p, before);
    }

    #[test]
    fn first_step_moves_by_lr_against_the_sign() {
        let mut p = ModelParams::zeros(4, 2);
        let mut g = ModelParams::zeros(4, 2);
        g.as_mut_slice()
            .iter_mut()
            .enumerate()
            .for_each(|(i, x)| *x = if i % 2 == 0 { 0.3 } else { -2.0 });
        let mut opt = OptimizerState::new(&p, 1e-3);
        opt.step(&mut p, &g).unwrap();
        // m_hat = g, v_hat = g^2, so the update is lr * g / (|g| + eps)
        for (x, gi) in p.as_slice().iter().zip(g.as_slice()) {
            let expected = -1e-3 * gi / (gi.abs() + 1e-8);
            assert!((x - expected).abs() < 1e-15, "{x} vs {expected}");
        }
    }

    #[test]
    fn shape_mismatch() {
        let mut p = ModelParams::zeros(4, 2);
        let mut opt = OptimizerState::new(&p, 1e-3);
        assert!(opt.step(&mut p, &ModelParams::zeros(4, 3)).is_err());
    }
}
