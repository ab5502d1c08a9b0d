//! Manifold interface and the concrete factors used by the optimizers.
//!
//! Points and tangent vectors are plain coordinate slices. A tangent vector
//! is always interpreted in the tangent space of the point passed alongside
//! it, so every operation that consumes one also takes its base point.

mod euclidean;
pub mod poincare;
mod product;

pub use euclidean::EuclideanFactor;
pub use poincare::PoincareBall;
pub use product::{Factor, ProductManifold, ProductPoint};

use crate::Result;
use serde::{Deserialize, Serialize};

/// Operations the optimizers need from a Riemannian manifold with
/// non-positive curvature.
pub trait Manifold {
    fn dim(&self) -> usize;

    /// Lower bound on the sectional curvature.
    fn curvature_lower_bound(&self) -> f64;

    /// The point feasible sets are centred on.
    fn origin(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }

    fn check_point(&self, x: &[f64]) -> Result<()>;

    /// Riemannian inner product at `x`. Assumes `x` is a valid point.
    fn inner(&self, x: &[f64], u: &[f64], v: &[f64]) -> f64;

    fn norm(&self, x: &[f64], v: &[f64]) -> f64 {
        self.inner(x, v, v).max(0.0).sqrt()
    }

    fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64>;

    fn exp(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>>;

    /// First-order approximation `x + v`, kept inside the manifold.
    fn retract(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>>;

    fn log(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>>;

    /// Parallel transport of `v` from `x` to `y` along the minimizing geodesic.
    fn transport(&self, x: &[f64], y: &[f64], v: &[f64]) -> Result<Vec<f64>>;

    fn egrad_to_rgrad(&self, x: &[f64], eg: &[f64]) -> Result<Vec<f64>>;

    /// Metric projection onto the closed geodesic ball of `radius` about
    /// [`Manifold::origin`].
    fn project_feasible(&self, x: &[f64], radius: f64) -> Vec<f64>;
}

/// One factor of a product manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Component {
    Euclidean(EuclideanFactor),
    Poincare(PoincareBall),
}

impl Component {
    pub fn euclidean(dim: usize) -> Self {
        Component::Euclidean(EuclideanFactor::new(dim))
    }

    pub fn poincare(dim: usize) -> Self {
        Component::Poincare(PoincareBall::new(dim))
    }

    fn as_dyn(&self) -> &dyn Manifold {
        match self {
            Component::Euclidean(m) => m,
            Component::Poincare(m) => m,
        }
    }
}

impl Manifold for Component {
    fn dim(&self) -> usize {
        self.as_dyn().dim()
    }
    fn curvature_lower_bound(&self) -> f64 {
        self.as_dyn().curvature_lower_bound()
    }
    fn check_point(&self, x: &[f64]) -> Result<()> {
        self.as_dyn().check_point(x)
    }
    fn inner(&self, x: &[f64], u: &[f64], v: &[f64]) -> f64 {
        self.as_dyn().inner(x, u, v)
    }
    fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.as_dyn().distance(x, y)
    }
    fn exp(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        self.as_dyn().exp(x, v)
    }
    fn retract(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        self.as_dyn().retract(x, v)
    }
    fn log(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        self.as_dyn().log(x, y)
    }
    fn transport(&self, x: &[f64], y: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        self.as_dyn().transport(x, y, v)
    }
    fn egrad_to_rgrad(&self, x: &[f64], eg: &[f64]) -> Result<Vec<f64>> {
        self.as_dyn().egrad_to_rgrad(x, eg)
    }
    fn project_feasible(&self, x: &[f64], radius: f64) -> Vec<f64> {
        self.as_dyn().project_feasible(x, radius)
    }
}

/// Random sampling helpers used by problem generators and tests.
pub mod sample {
    use rand::Rng;

    use super::{Component, Manifold};
    use crate::linalg;

    /// A direction drawn uniformly from the unit sphere.
    pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
            let n = linalg::norm(&v);
            if n > 1e-12 {
                return linalg::scale(&v, 1.0 / n);
            }
        }
    }

    pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// A point at geodesic distance drawn uniformly from `[0, radius]` from
    /// the origin, in a uniformly random direction.
    pub fn point_in_ball<R: Rng + ?Sized>(rng: &mut R, m: &Component, radius: f64) -> Vec<f64> {
        let dir = unit_vector(rng, m.dim());
        let r = rng.gen_range(0.0..=radius);
        match m {
            Component::Euclidean(_) => linalg::scale(&dir, r),
            Component::Poincare(_) => linalg::scale(&dir, (r / 2.0).tanh()),
        }
    }

    /// A tangent vector at `x` with Riemannian norm drawn from `[0, max_norm]`.
    pub fn tangent<R: Rng + ?Sized>(
        rng: &mut R,
        m: &Component,
        x: &[f64],
        max_norm: f64,
    ) -> Vec<f64> {
        let dir = unit_vector(rng, m.dim());
        let unit = m.norm(x, &dir);
        let r = rng.gen_range(0.0..=max_norm);
        linalg::scale(&dir, r / unit)
    }
}
