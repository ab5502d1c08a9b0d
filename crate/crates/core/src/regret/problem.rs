use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::manifold::{sample, Component, Factor, Manifold, ProductManifold, ProductPoint};
use crate::{linalg, Error, Result};

/// An online problem with losses `f_t(x) = ½ Σᵢ dⁱ(xⁱ, p_tⁱ)²` over the
/// product of geodesic balls of radius `radius` about the origin.
#[derive(Debug, Clone)]
pub struct ConvexProblem {
    pub manifold: ProductManifold,
    pub targets: Vec<ProductPoint>,
    pub radius: f64,
    pub start: ProductPoint,
    /// Seed the targets were drawn with, when generated.
    pub seed: Option<u64>,
}

impl ConvexProblem {
    pub fn new(components: &[Component], radius: f64, targets: Vec<ProductPoint>) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Config(format!(
                "feasible radius must be positive, got {radius}"
            )));
        }
        let manifold = ProductManifold::new(
            components
                .iter()
                .map(|&manifold| Factor {
                    manifold,
                    radius: Some(radius),
                })
                .collect(),
        );
        for (t, p) in targets.iter().enumerate() {
            manifold.check_point(p)?;
            for (f, pi) in manifold.factors().iter().zip(p) {
                let d = f.manifold.distance(&f.manifold.origin(), pi)?;
                let outside = match f.manifold {
                    // coordinate factors use the interval [-r, r]
                    Component::Euclidean(e) if e.dim == 1 => pi[0].abs() > radius + 1e-12,
                    _ => d > radius + 1e-9,
                };
                if outside {
                    return Err(Error::Config(format!(
                        "target {t} lies outside the feasible set"
                    )));
                }
            }
        }
        let start = manifold.origin();
        Ok(Self {
            manifold,
            targets,
            radius,
            start,
            seed: None,
        })
    }

    /// Targets drawn independently and uniformly in geodesic radius inside
    /// the feasible set.
    pub fn random(
        components: &[Component],
        radius: f64,
        horizon: usize,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let targets = (0..horizon)
            .map(|_| {
                components
                    .iter()
                    .map(|c| sample::point_in_ball(&mut rng, c, radius))
                    .collect()
            })
            .collect();
        let mut p = Self::new(components, radius, targets)?;
        p.seed = Some(seed);
        Ok(p)
    }

    pub fn horizon(&self) -> usize {
        self.targets.len()
    }

    /// Diameter bound of each feasible component.
    pub fn d_inf(&self) -> f64 {
        2.0 * self.radius
    }

    /// Gradient norm bound; for squared-distance losses this is the diameter.
    pub fn g_inf(&self) -> f64 {
        self.d_inf()
    }

    pub fn kappas(&self) -> Vec<f64> {
        self.manifold.curvature_bounds()
    }

    /// `f_t(x)` for the zero-based round `t`.
    pub fn loss(&self, t: usize, x: &[Vec<f64>]) -> Result<f64> {
        Ok(0.5
            * self
                .manifold
                .component_distances(x, &self.targets[t])?
                .iter()
                .map(|d| d * d)
                .sum::<f64>())
    }

    /// Riemannian gradient `-log_x(p_t)` of `f_t`.
    pub fn rgrad(&self, t: usize, x: &[Vec<f64>]) -> Result<ProductPoint> {
        Ok(self
            .manifold
            .log(x, &self.targets[t])?
            .into_iter()
            .map(|l| linalg::scale(&l, -1.0))
            .collect())
    }

    /// `Σ_{t < prefix} f_t(x)`.
    pub fn prefix_objective(&self, prefix: usize, x: &[Vec<f64>]) -> Result<f64> {
        (0..prefix).map(|t| self.loss(t, x)).sum()
    }
}
