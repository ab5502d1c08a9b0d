use serde::{Deserialize, Serialize};

use super::{Component, Manifold};
use crate::{Error, Result};

/// A point (or tangent vector) of a product manifold, one coordinate block
/// per component.
pub type ProductPoint = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub manifold: Component,
    /// Geodesic radius of the feasible ball about the component origin.
    /// `None` leaves the component unconstrained.
    pub radius: Option<f64>,
}

/// `M₁ × ⋯ × Mₙ` with the block-diagonal product metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductManifold {
    factors: Vec<Factor>,
}

impl ProductManifold {
    pub fn new(factors: Vec<Factor>) -> Self {
        Self { factors }
    }

    /// `n` copies of the same component sharing one feasible radius.
    pub fn uniform(manifold: Component, n: usize, radius: Option<f64>) -> Self {
        Self::new(vec![Factor { manifold, radius }; n])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &Factor {
        &self.factors[i]
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.manifold.dim()).sum()
    }

    pub fn curvature_bounds(&self) -> Vec<f64> {
        self.factors
            .iter()
            .map(|f| f.manifold.curvature_lower_bound())
            .collect()
    }

    pub fn origin(&self) -> ProductPoint {
        self.factors.iter().map(|f| f.manifold.origin()).collect()
    }

    fn check_count(&self, got: usize) -> Result<()> {
        if got != self.factors.len() {
            return Err(Error::ComponentCount {
                expected: self.factors.len(),
                got,
            });
        }
        Ok(())
    }

    /// Checks block count, block dimensions and that each block is a point.
    pub fn check_point(&self, x: &[Vec<f64>]) -> Result<()> {
        self.check_count(x.len())?;
        for (f, xi) in self.factors.iter().zip(x) {
            f.manifold.check_point(xi)?;
        }
        Ok(())
    }

    pub fn check_tangent(&self, v: &[Vec<f64>]) -> Result<()> {
        self.check_count(v.len())?;
        for (f, vi) in self.factors.iter().zip(v) {
            if vi.len() != f.manifold.dim() {
                return Err(Error::DimensionMismatch {
                    expected: f.manifold.dim(),
                    got: vi.len(),
                });
            }
        }
        Ok(())
    }

    pub fn inner(&self, x: &[Vec<f64>], u: &[Vec<f64>], v: &[Vec<f64>]) -> Result<f64> {
        self.check_count(x.len())?;
        self.check_tangent(u)?;
        self.check_tangent(v)?;
        Ok(self
            .factors
            .iter()
            .enumerate()
            .map(|(i, f)| f.manifold.inner(&x[i], &u[i], &v[i]))
            .sum())
    }

    pub fn norm(&self, x: &[Vec<f64>], v: &[Vec<f64>]) -> Result<f64> {
        Ok(self.inner(x, v, v)?.max(0.0).sqrt())
    }

    /// Per-component distances `dⁱ(xⁱ, yⁱ)`.
    pub fn component_distances(&self, x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        self.check_point(y)?;
        self.factors
            .iter()
            .enumerate()
            .map(|(i, f)| f.manifold.distance(&x[i], &y[i]))
            .collect()
    }

    /// `d(x, y) = sqrt(Σ dⁱ(xⁱ, yⁱ)²)`.
    pub fn distance(&self, x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<f64> {
        Ok(self
            .component_distances(x, y)?
            .iter()
            .map(|d| d * d)
            .sum::<f64>()
            .sqrt())
    }

    fn blockwise<F>(&self, a: &[Vec<f64>], b: &[Vec<f64>], op: F) -> Result<ProductPoint>
    where
        F: Fn(&Component, &[f64], &[f64]) -> Result<Vec<f64>>,
    {
        self.check_count(a.len())?;
        self.check_count(b.len())?;
        self.factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let dim = f.manifold.dim();
                for blk in [&a[i], &b[i]] {
                    if blk.len() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            got: blk.len(),
                        });
                    }
                }
                op(&f.manifold, &a[i], &b[i])
            })
            .collect()
    }

    pub fn exp(&self, x: &[Vec<f64>], v: &[Vec<f64>]) -> Result<ProductPoint> {
        self.blockwise(x, v, |m, xi, vi| m.exp(xi, vi))
    }

    pub fn retract(&self, x: &[Vec<f64>], v: &[Vec<f64>]) -> Result<ProductPoint> {
        self.blockwise(x, v, |m, xi, vi| m.retract(xi, vi))
    }

    pub fn log(&self, x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<ProductPoint> {
        self.blockwise(x, y, |m, xi, yi| m.log(xi, yi))
    }

    pub fn egrad_to_rgrad(&self, x: &[Vec<f64>], eg: &[Vec<f64>]) -> Result<ProductPoint> {
        self.blockwise(x, eg, |m, xi, gi| m.egrad_to_rgrad(xi, gi))
    }

    pub fn transport(
        &self,
        x: &[Vec<f64>],
        y: &[Vec<f64>],
        v: &[Vec<f64>],
    ) -> Result<ProductPoint> {
        self.check_point(x)?;
        self.check_point(y)?;
        self.check_tangent(v)?;
        self.factors
            .iter()
            .enumerate()
            .map(|(i, f)| f.manifold.transport(&x[i], &y[i], &v[i]))
            .collect()
    }

    /// Projects every constrained block onto its feasible ball.
    pub fn project_feasible(&self, x: &[Vec<f64>]) -> Result<ProductPoint> {
        self.check_count(x.len())?;
        Ok(self
            .factors
            .iter()
            .zip(x)
            .map(|(f, xi)| match f.radius {
                Some(r) => f.manifold.project_feasible(xi, r),
                None => xi.clone(),
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::linalg;
    use crate::manifold::sample;

    fn mixed() -> ProductManifold {
        ProductManifold::new(vec![
            Factor {
                manifold: Component::euclidean(2),
                radius: Some(3.0),
            },
            Factor {
                manifold: Component::poincare(3),
                radius: Some(2.0),
            },
            Factor {
                manifold: Component::poincare(2),
                radius: None,
            },
        ])
    }

    fn random_point(rng: &mut ChaCha8Rng, m: &ProductManifold) -> ProductPoint {
        m.factors()
            .iter()
            .map(|f| sample::point_in_ball(rng, &f.manifold, 3.0))
            .collect()
    }

    #[test]
    fn product_distance_is_root_sum_of_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = mixed();
        for _ in 0..500 {
            let x = random_point(&mut rng, &m);
            let y = random_point(&mut rng, &m);
            let d = m.distance(&x, &y).unwrap();
            let parts: f64 = m
                .factors()
                .iter()
                .enumerate()
                .map(|(i, f)| f.manifold.distance(&x[i], &y[i]).unwrap().powi(2))
                .sum();
            assert!((d * d - parts).abs() < 1e-10);
        }
    }

    #[test]
    fn euclidean_product_is_flat_arithmetic() {
        let m = ProductManifold::uniform(Component::euclidean(1), 3, None);
        let x = vec![vec![1.0], vec![2.0], vec![-1.0]];
        let v = vec![vec![0.5], vec![-0.25], vec![4.0]];
        assert_eq!(
            m.exp(&x, &v).unwrap(),
            vec![vec![1.5], vec![1.75], vec![3.0]]
        );
        let d = m.distance(&x, &m.exp(&x, &v).unwrap()).unwrap();
        let flat = linalg::norm(&[0.5, -0.25, 4.0]);
        assert!((d - flat).abs() < 1e-15);
        assert_eq!(m.transport(&x, &v, &v).unwrap(), v);
    }

    #[test]
    fn mixed_exp_matches_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = mixed();
        for _ in 0..200 {
            let x = random_point(&mut rng, &m);
            let v: ProductPoint = m
                .factors()
                .iter()
                .enumerate()
                .map(|(i, f)| sample::tangent(&mut rng, &f.manifold, &x[i], 2.0))
                .collect();
            let y = m.exp(&x, &v).unwrap();
            // Euclidean block is plain addition
            assert_eq!(y[0], linalg::add(&x[0], &v[0]));
            for i in 1..3 {
                let expected = match m.factor(i).manifold {
                    Component::Poincare(b) => {
                        let vn = linalg::norm(&v[i]);
                        let lam = crate::manifold::poincare::conformal_factor(&x[i]).unwrap();
                        let s = linalg::scale(&v[i], (lam * vn / 2.0).tanh() / vn);
                        b.clip(crate::manifold::poincare::mobius_add(&x[i], &s).unwrap())
                    }
                    _ => unreachable!(),
                };
                assert!(linalg::max_abs_diff(&y[i], &expected) < 1e-15);
            }
            let back = m.log(&x, &y).unwrap();
            for i in 0..3 {
                assert!(linalg::max_abs_diff(&back[i], &v[i]) < 1e-9);
            }
        }
    }

    #[test]
    fn component_count_mismatch() {
        let m = mixed();
        let x = vec![vec![0.0, 0.0]];
        assert!(matches!(
            m.exp(&x, &x),
            Err(Error::ComponentCount {
                expected: 3,
                got: 1
            })
        ));
        let bad = vec![vec![0.0], vec![0.0; 3], vec![0.0; 2]];
        assert!(matches!(
            m.check_point(&bad),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn projection_respects_radius_per_component() {
        let m = mixed();
        let x = vec![vec![10.0, 0.0], vec![0.99, 0.0, 0.0], vec![0.99, 0.0]];
        let p = m.project_feasible(&x).unwrap();
        assert!((linalg::norm(&p[0]) - 3.0).abs() < 1e-12);
        assert!((m.factor(1).manifold.distance(&[0.0; 3], &p[1]).unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(p[2], x[2]);
    }
}
