//! Online geodesically convex optimization on product manifolds: problem
//! generation, empirical regret, and the closed-form regret bounds of
//! RAMSGRAD, RADAMNC and Euclidean AMSGRAD.

mod bounds;
pub mod lemmas;
mod oracle;
mod problem;
mod run;

pub use bounds::{amsgrad_bound, check_hypotheses, radamnc_bound, ramsgrad_bound, Theorem};
pub use oracle::{comparator_oracle, grid_search, karcher_minimizer, Comparator};
pub use problem::ConvexProblem;
pub use run::{
    empirical_regret, verify_bound, Learner, RegretRecord, RegretRun, StepRecord, Verdict,
};

use crate::{Error, Result};

/// `ζ(κ, c) = c√|κ| / tanh(c√|κ|)`, with the removable limit 1 at
/// `κ = 0` or `c = 0`.
pub fn zeta(kappa: f64, c: f64) -> Result<f64> {
    if kappa > 0.0 || kappa.is_nan() {
        return Err(Error::Domain(format!(
            "zeta needs a non-positive curvature, got {kappa}"
        )));
    }
    if c < 0.0 || c.is_nan() {
        return Err(Error::Domain(format!(
            "zeta needs a non-negative length, got {c}"
        )));
    }
    let x = c * (-kappa).sqrt();
    if x < 1e-8 {
        // x / tanh(x) = 1 + x²/3 + O(x⁴)
        return Ok(1.0 + x * x / 3.0);
    }
    Ok(x / x.tanh())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_limits_and_values() {
        for c in [0.0, 0.5, 3.0, 100.0] {
            assert_eq!(zeta(0.0, c).unwrap(), 1.0);
        }
        assert_eq!(zeta(-1.0, 0.0).unwrap(), 1.0);
        // 1 / tanh(1)
        assert!((zeta(-1.0, 1.0).unwrap() - 1.313_035_285_499_331_3).abs() < 1e-15);
        assert!(zeta(0.5, 1.0).is_err());
        assert!(zeta(-1.0, -1.0).is_err());
    }

    #[test]
    fn zeta_small_curvature_expansion() {
        // with c = 1 the printed first-order form 1 + (c/3)|κ| and the
        // Taylor form 1 + c²|κ|/3 coincide
        for k in [1e-3, 5e-4, 1e-4, 1e-6] {
            let z = zeta(-k, 1.0).unwrap();
            assert!((z - (1.0 + k / 3.0)).abs() < k * k);
        }
        for c in [0.5, 2.0, 4.0] {
            for k in [1e-3, 1e-4, 1e-5] {
                let z = zeta(-k, c).unwrap();
                let x2: f64 = c * c * k;
                assert!((z - (1.0 + x2 / 3.0)).abs() <= x2 * x2 / 45.0 * 1.01 + 1e-15);
            }
        }
    }

    #[test]
    fn zeta_is_monotone() {
        let mut prev = 1.0;
        for i in 0..200 {
            let c = i as f64 * 0.05;
            let z = zeta(-1.0, c).unwrap();
            assert!(z >= prev);
            prev = z;
        }
        let mut prev = 1.0;
        for i in 0..200 {
            let z = zeta(-(i as f64) * 0.05, 2.0).unwrap();
            assert!(z >= prev);
            prev = z;
        }
    }
}
