//! Coordinatewise ADAGRAD, ADAM and AMSGRAD in `ℝⁿ`, with projection onto
//! per-coordinate intervals `[-r, r]`.
//!
//! These follow the textbook recurrences with no bias correction and with
//! the same `ε` placement as the Riemannian methods, which makes them exact
//! references for products of real lines.

use serde::{Deserialize, Serialize};

use super::HyperParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    Adagrad,
    Adam,
    Amsgrad,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateState {
    pub t: u64,
    pub m: Vec<f64>,
    /// Sum of squared gradients for ADAGRAD, moving average otherwise.
    pub v: Vec<f64>,
    pub v_hat: Vec<f64>,
}

impl CoordinateState {
    pub fn new(n: usize) -> Self {
        Self {
            t: 0,
            m: vec![0.0; n],
            v: vec![0.0; n],
            v_hat: vec![0.0; n],
        }
    }
}

#[derive(Debug, Clone)]
pub struct EuclideanOptimizer {
    kind: Reference,
    hyper: HyperParams,
    radius: Option<f64>,
    state: CoordinateState,
}

impl EuclideanOptimizer {
    pub fn new(kind: Reference, hyper: HyperParams, n: usize, radius: Option<f64>) -> Result<Self> {
        hyper.validate()?;
        if kind == Reference::Amsgrad && !hyper.amsgrad_max {
            return Err(Error::Config("amsgrad requires the max on v".into()));
        }
        Ok(Self {
            kind,
            hyper,
            radius,
            state: CoordinateState::new(n),
        })
    }

    pub fn state(&self) -> &CoordinateState {
        &self.state
    }

    pub fn step(&mut self, x: &mut [f64], g: &[f64]) -> Result<()> {
        let n = self.state.m.len();
        if x.len() != n || g.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: if x.len() != n { x.len() } else { g.len() },
            });
        }
        let hp = &self.hyper;
        let s = &mut self.state;
        s.t += 1;
        let t = s.t;
        let alpha_t = hp.alpha_schedule.at(hp.alpha, t);
        match self.kind {
            Reference::Adagrad => {
                for i in 0..n {
                    s.v[i] += g[i] * g[i];
                    s.v_hat[i] = s.v[i];
                    let c = -alpha_t / (s.v[i].sqrt() + hp.epsilon);
                    x[i] += c * g[i];
                }
            }
            Reference::Adam | Reference::Amsgrad => {
                let b1 = hp.beta1.at(t);
                let b2 = hp.beta2.at(t);
                for i in 0..n {
                    s.m[i] = b1 * s.m[i] + (1.0 - b1) * g[i];
                    s.v[i] = b2 * s.v[i] + (1.0 - b2) * (g[i] * g[i]);
                    s.v_hat[i] = if self.kind == Reference::Amsgrad {
                        s.v_hat[i].max(s.v[i])
                    } else {
                        s.v[i]
                    };
                    let c = -alpha_t / (s.v_hat[i].sqrt() + hp.epsilon);
                    x[i] += c * s.m[i];
                }
            }
        }
        if let Some(r) = self.radius {
            x.iter_mut().for_each(|xi| *xi = xi.clamp(-r, r));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adagrad_two_step_trace() {
        let hp = HyperParams::radagrad(1.0);
        let mut opt = EuclideanOptimizer::new(Reference::Adagrad, hp, 2, None).unwrap();
        let mut x = vec![0.0, 0.0];
        opt.step(&mut x, &[1.0, 0.0]).unwrap();
        assert!((x[0] + 1.0).abs() < 1e-7 && x[1] == 0.0);
        let after_first = x.clone();
        opt.step(&mut x, &[1.0, 1.0]).unwrap();
        let dx = [x[0] - after_first[0], x[1] - after_first[1]];
        assert!((dx[0] + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-7);
        assert!((dx[1] + 1.0).abs() < 1e-7);
    }

    #[test]
    fn amsgrad_equals_adam_when_v_monotone() {
        let mut adam = EuclideanOptimizer::new(
            Reference::Adam,
            HyperParams::radam(0.1, 0.9, 0.99),
            3,
            Some(5.0),
        )
        .unwrap();
        let mut ams = EuclideanOptimizer::new(
            Reference::Amsgrad,
            HyperParams::ramsgrad(0.1, 0.9, 0.99),
            3,
            Some(5.0),
        )
        .unwrap();
        let mut xa = vec![0.0; 3];
        let mut xb = vec![0.0; 3];
        for t in 0..40 {
            let s = 1.1f64.powi(t);
            let g = [s, -2.0 * s, 0.5 * s];
            adam.step(&mut xa, &g).unwrap();
            ams.step(&mut xb, &g).unwrap();
            assert_eq!(xa, xb);
        }
    }

    #[test]
    fn projection_clamps_each_coordinate() {
        let mut opt = EuclideanOptimizer::new(
            Reference::Adam,
            HyperParams::radam(10.0, 0.0, 0.5),
            2,
            Some(1.0),
        )
        .unwrap();
        let mut x = vec![0.0, 0.0];
        opt.step(&mut x, &[-1.0, 1.0]).unwrap();
        assert_eq!(x, vec![1.0, -1.0]);
    }
}
