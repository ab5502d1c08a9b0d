use serde::{Deserialize, Serialize};

use super::Manifold;
use crate::{linalg, Error, Result};

/// Flat `ℝⁿ` with the identity metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EuclideanFactor {
    pub dim: usize,
}

impl EuclideanFactor {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "euclidean factor needs a positive dimension");
        Self { dim }
    }
}

impl Manifold for EuclideanFactor {
    fn dim(&self) -> usize {
        self.dim
    }

    fn curvature_lower_bound(&self) -> f64 {
        0.0
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    fn inner(&self, _x: &[f64], u: &[f64], v: &[f64]) -> f64 {
        linalg::dot(u, v)
    }

    fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        Ok(linalg::norm(&linalg::sub(x, y)))
    }

    fn exp(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        Ok(linalg::add(x, v))
    }

    fn retract(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        Ok(linalg::add(x, v))
    }

    fn log(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        Ok(linalg::sub(y, x))
    }

    fn transport(&self, _x: &[f64], _y: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        Ok(v.to_vec())
    }

    fn egrad_to_rgrad(&self, _x: &[f64], eg: &[f64]) -> Result<Vec<f64>> {
        Ok(eg.to_vec())
    }

    fn project_feasible(&self, x: &[f64], radius: f64) -> Vec<f64> {
        // For dim 1 this is clamping to [-radius, radius].
        if self.dim == 1 {
            return vec![x[0].clamp(-radius, radius)];
        }
        let n = linalg::norm(x);
        if n <= radius {
            x.to_vec()
        } else {
            linalg::scale(x, radius / n)
        }
    }
}
