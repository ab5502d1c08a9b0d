//! The Poincaré ball `𝔻ⁿ` with curvature −1, in gyrovector form.
//!
//! All closed forms go through Möbius addition: distances, the exponential
//! and logarithmic maps, and parallel transport via gyrations.

use serde::{Deserialize, Serialize};

use super::Manifold;
use crate::{linalg, Error, Result};

/// Default margin kept between iterates and the unit sphere.
pub const BOUNDARY_EPS: f64 = 1e-5;

/// Tangent vectors shorter than this are treated as zero by the exp map.
const ZERO_TANGENT: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareBall {
    pub dim: usize,
    pub boundary_eps: f64,
}

impl PoincareBall {
    pub fn new(dim: usize) -> Self {
        Self::with_boundary_eps(dim, BOUNDARY_EPS)
    }

    pub fn with_boundary_eps(dim: usize, boundary_eps: f64) -> Self {
        assert!(dim > 0, "poincare ball needs a positive dimension");
        assert!(
            boundary_eps > 0.0 && boundary_eps < 1.0,
            "boundary_eps must lie in (0, 1)"
        );
        Self { dim, boundary_eps }
    }

    /// Rescales `x` onto the ball of euclidean radius `1 - boundary_eps` if
    /// it lies outside of it.
    pub fn clip(&self, mut x: Vec<f64>) -> Vec<f64> {
        let max_norm = 1.0 - self.boundary_eps;
        let n = linalg::norm(&x);
        if n > max_norm {
            let s = max_norm / n;
            x.iter_mut().for_each(|c| *c *= s);
        }
        x
    }
}

fn check(x: &[f64]) -> Result<f64> {
    let n2 = linalg::norm_sq(x);
    if n2 < 1.0 && n2.is_finite() {
        Ok(n2)
    } else {
        Err(Error::Boundary { norm: n2.sqrt() })
    }
}

/// `λ_x = 2 / (1 - ‖x‖²)`.
pub fn conformal_factor(x: &[f64]) -> Result<f64> {
    let n2 = check(x)?;
    Ok(2.0 / (1.0 - n2))
}

#[inline]
fn lambda_unchecked(x: &[f64]) -> f64 {
    2.0 / (1.0 - linalg::norm_sq(x))
}

fn mobius_add_unchecked(x: &[f64], y: &[f64]) -> Vec<f64> {
    let xy = linalg::dot(x, y);
    let x2 = linalg::norm_sq(x);
    let y2 = linalg::norm_sq(y);
    let a = 1.0 + 2.0 * xy + y2;
    let b = 1.0 - x2;
    let den = 1.0 + 2.0 * xy + x2 * y2;
    x.iter()
        .zip(y)
        .map(|(xi, yi)| (a * xi + b * yi) / den)
        .collect()
}

/// Möbius addition `x ⊕ y`.
pub fn mobius_add(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    check(x)?;
    check(y)?;
    Ok(mobius_add_unchecked(x, y))
}

fn gyration_unchecked(u: &[f64], v: &[f64], w: &[f64]) -> Vec<f64> {
    let u2 = linalg::norm_sq(u);
    let v2 = linalg::norm_sq(v);
    let uv = linalg::dot(u, v);
    let uw = linalg::dot(u, w);
    let vw = linalg::dot(v, w);
    let a = -uw * v2 + vw + 2.0 * uv * vw;
    let b = -vw * u2 - uw;
    let d = 1.0 + 2.0 * uv + u2 * v2;
    w.iter()
        .zip(u.iter().zip(v))
        .map(|(wi, (ui, vi))| wi + 2.0 * (a * ui + b * vi) / d)
        .collect()
}

/// The gyration `gyr[u, v] w`, an orthogonal map of `w` satisfying
/// `u ⊕ (v ⊕ w) = (u ⊕ v) ⊕ gyr[u, v] w`.
pub fn gyration(u: &[f64], v: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    check(u)?;
    check(v)?;
    Ok(gyration_unchecked(u, v, w))
}

#[inline]
fn neg(x: &[f64]) -> Vec<f64> {
    x.iter().map(|c| -c).collect()
}

fn artanh_clamped(z: f64) -> f64 {
    z.min(1.0 - f64::EPSILON).atanh()
}

impl Manifold for PoincareBall {
    fn dim(&self) -> usize {
        self.dim
    }

    fn curvature_lower_bound(&self) -> f64 {
        -1.0
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        check(x).map(|_| ())
    }

    fn inner(&self, x: &[f64], u: &[f64], v: &[f64]) -> f64 {
        let l = lambda_unchecked(x);
        l * l * linalg::dot(u, v)
    }

    fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check(x)?;
        check(y)?;
        if x == y {
            return Ok(0.0);
        }
        let w = mobius_add_unchecked(&neg(x), y);
        Ok(2.0 * artanh_clamped(linalg::norm(&w)))
    }

    fn exp(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        let x2 = check(x)?;
        let vn = linalg::norm(v);
        if vn < ZERO_TANGENT {
            return Ok(x.to_vec());
        }
        let lambda = 2.0 / (1.0 - x2);
        let s = (lambda * vn / 2.0).tanh() / vn;
        let step = linalg::scale(v, s);
        Ok(self.clip(mobius_add_unchecked(x, &step)))
    }

    fn retract(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        check(x)?;
        Ok(self.clip(linalg::add(x, v)))
    }

    fn log(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let x2 = check(x)?;
        check(y)?;
        if x == y {
            return Ok(vec![0.0; x.len()]);
        }
        let w = mobius_add_unchecked(&neg(x), y);
        let wn = linalg::norm(&w);
        if wn == 0.0 {
            return Ok(vec![0.0; x.len()]);
        }
        let lambda = 2.0 / (1.0 - x2);
        Ok(linalg::scale(&w, 2.0 / lambda * artanh_clamped(wn) / wn))
    }

    fn transport(&self, x: &[f64], y: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        let lx = conformal_factor(x)?;
        let ly = conformal_factor(y)?;
        let g = gyration_unchecked(y, &neg(x), v);
        Ok(linalg::scale(&g, lx / ly))
    }

    fn egrad_to_rgrad(&self, x: &[f64], eg: &[f64]) -> Result<Vec<f64>> {
        let l = conformal_factor(x)?;
        Ok(linalg::scale(eg, 1.0 / (l * l)))
    }

    fn project_feasible(&self, x: &[f64], radius: f64) -> Vec<f64> {
        // Geodesic balls about the origin are euclidean balls of radius
        // tanh(r / 2).
        let max_norm = (radius / 2.0).tanh().min(1.0 - self.boundary_eps);
        let n = linalg::norm(x);
        if n <= max_norm {
            x.to_vec()
        } else {
            linalg::scale(x, max_norm / n)
        }
    }
}
