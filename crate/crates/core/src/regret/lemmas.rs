//! Scalar inequalities used by the regret analysis, exposed as checkable
//! functions.

use super::zeta;
use crate::{linalg, Result};

/// Both sides of `a² ≤ ζ(κ, c) b² + c² - 2bc cos A` for a geodesic
/// triangle with sides `a, b, c` and angle `A` between `b` and `c`.
pub fn alexandrov_sides(kappa: f64, a: f64, b: f64, c: f64, cos_a: f64) -> Result<(f64, f64)> {
    Ok((a * a, zeta(kappa, c)? * b * b + c * c - 2.0 * b * c * cos_a))
}

/// Both sides of `‖Σ aᵢuᵢ‖² ≤ (Σ aᵢ)(Σ aᵢ‖uᵢ‖²)` for non-negative weights.
pub fn weighted_sum_sides(weights: &[f64], vectors: &[Vec<f64>]) -> (f64, f64) {
    let dim = vectors.first().map_or(0, |v| v.len());
    let mut s = vec![0.0; dim];
    let mut total = 0.0;
    let mut weighted_sq = 0.0;
    for (&a, u) in weights.iter().zip(vectors) {
        s = linalg::lincomb(1.0, &s, a, u);
        total += a;
        weighted_sq += a * linalg::norm_sq(u);
    }
    (linalg::norm_sq(&s), total * weighted_sq)
}

/// Both sides of `Σᵢ yᵢ / √(Σ_{j≤i} yⱼ) ≤ 2 √(Σᵢ yᵢ)` for non-negative
/// `y`. Terms with a zero prefix sum contribute nothing.
pub fn prefix_sqrt_sides(y: &[f64]) -> (f64, f64) {
    let mut prefix = 0.0;
    let mut lhs = 0.0;
    for &yi in y {
        prefix += yi;
        if prefix > 0.0 {
            lhs += yi / prefix.sqrt();
        }
    }
    (lhs, 2.0 * prefix.sqrt())
}

/// `Σᵢ √(Σ_t ‖g_tⁱ‖²)`, the gradient-dependent factor of the bounds.
/// `grad_norms[t][i]` is the norm of component `i` at round `t`.
pub fn gradient_term(grad_norms: &[Vec<f64>]) -> f64 {
    let n = grad_norms.first().map_or(0, |g| g.len());
    (0..n)
        .map(|i| grad_norms.iter().map(|g| g[i] * g[i]).sum::<f64>().sqrt())
        .sum()
}
