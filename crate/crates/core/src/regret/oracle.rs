//! Independent computation of `min_{x ∈ 𝒳} Σ_t f_t(x)`.
//!
//! The summed loss separates over components, so each component is
//! minimized on its own. The primary route is projected Riemannian gradient
//! descent with backtracking; for components of dimension at most two a
//! zooming grid search provides a second, derivative-free answer.

use crate::manifold::{Component, Factor, Manifold, ProductPoint};
use crate::regret::ConvexProblem;
use crate::{linalg, Error, Result};

const GRAD_TOL: f64 = 1e-10;
const STALL_TOL: f64 = 1e-7;
const MAX_ITERS: usize = 10_000;
const AGREEMENT_TOL: f64 = 1e-4;

fn objective(factor: &Factor, targets: &[&[f64]], x: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for p in targets {
        let d = factor.manifold.distance(x, p)?;
        s += 0.5 * d * d;
    }
    Ok(s)
}

fn project(factor: &Factor, x: &[f64]) -> Vec<f64> {
    match factor.radius {
        Some(r) => factor.manifold.project_feasible(x, r),
        None => x.to_vec(),
    }
}

/// Minimizes `½ Σ d(x, p)²` over the feasible ball of one component,
/// starting from `start`. Returns the minimizer and the objective value.
pub fn karcher_minimizer(
    factor: &Factor,
    targets: &[&[f64]],
    start: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let m = &factor.manifold;
    let mut x = project(factor, start);
    if targets.is_empty() {
        return Ok((x, 0.0));
    }
    let n = targets.len() as f64;
    let mut fx = objective(factor, targets, &x)?;
    let mut eta = 1.0;
    for _ in 0..MAX_ITERS {
        // gradient of the averaged objective
        let mut g = vec![0.0; x.len()];
        for p in targets {
            let l = m.log(&x, p)?;
            g.iter_mut().zip(&l).for_each(|(gi, li)| *gi -= li / n);
        }
        let gn = m.norm(&x, &g);
        if gn <= GRAD_TOL {
            return Ok((x, fx));
        }
        let mut accepted = false;
        while eta > 1e-12 {
            let cand = project(factor, &m.exp(&x, &linalg::scale(&g, -eta))?);
            let fc = objective(factor, targets, &cand)?;
            if fc < fx && fc <= fx - 1e-4 * eta * gn * gn * n {
                x = cand;
                fx = fc;
                accepted = true;
                break;
            }
            if gn <= STALL_TOL {
                // the decrease is below floating-point resolution of the
                // objective; the value error is O(n·gn²)
                return Ok((x, fx));
            }
            eta *= 0.5;
        }
        if !accepted {
            // a constrained minimizer on the boundary has a non-vanishing
            // gradient; accept when the projected step no longer moves
            let cand = project(factor, &m.exp(&x, &linalg::scale(&g, -1.0))?);
            if m.distance(&x, &cand)? <= GRAD_TOL {
                return Ok((x, fx));
            }
            return Err(Error::Oracle("line search stalled".into()));
        }
        // let the step grow back after successful iterations
        eta = (eta * 2.0).min(1.0);
    }
    Err(Error::Oracle(format!(
        "no convergence to gradient norm {GRAD_TOL} within {MAX_ITERS} iterations"
    )))
}

/// Derivative-free minimization over a component of dimension ≤ 2 by a
/// dense grid followed by repeated zooming around the incumbent.
pub fn grid_search(factor: &Factor, targets: &[&[f64]]) -> Result<(Vec<f64>, f64)> {
    let dim = factor.manifold.dim();
    if dim > 2 {
        return Err(Error::Oracle(format!(
            "grid search supports dim <= 2, got {dim}"
        )));
    }
    // euclidean half-width of the coordinate box containing the feasible set
    let half = match (factor.manifold, factor.radius) {
        (Component::Poincare(_), Some(r)) => (r / 2.0).tanh(),
        (Component::Poincare(b), None) => 1.0 - b.boundary_eps,
        (Component::Euclidean(_), Some(r)) => r,
        (Component::Euclidean(_), None) => {
            return Err(Error::Oracle(
                "grid search needs a bounded feasible set".into(),
            ))
        }
    };
    let per_axis = if dim == 1 { 2001 } else { 201 };
    let mut center = vec![0.0; dim];
    let mut width = half;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..12 {
        let step = 2.0 * width / (per_axis - 1) as f64;
        let axis: Vec<f64> = (0..per_axis).map(|k| -width + k as f64 * step).collect();
        let mut visit = |p: Vec<f64>| -> Result<()> {
            let p = project(factor, &p);
            if let Component::Poincare(_) = factor.manifold {
                if linalg::norm_sq(&p) >= 1.0 {
                    return Ok(());
                }
            }
            let f = objective(factor, targets, &p)?;
            if best.as_ref().is_none_or(|(_, bf)| f < *bf) {
                best = Some((p, f));
            }
            Ok(())
        };
        if dim == 1 {
            for a in &axis {
                visit(vec![center[0] + a])?;
            }
        } else {
            for a in &axis {
                for b in &axis {
                    visit(vec![center[0] + a, center[1] + b])?;
                }
            }
        }
        center = best.as_ref().expect("grid has feasible points").0.clone();
        width = 4.0 * step;
    }
    Ok(best.expect("grid has feasible points"))
}

/// The comparator `min_{x ∈ 𝒳} Σ_{t < prefix} f_t(x)`.
#[derive(Debug, Clone)]
pub struct Comparator {
    pub point: ProductPoint,
    pub value: f64,
    /// Objective at the grid-search minimizer, when the grid was run.
    pub grid_value: Option<f64>,
}

/// Runs the gradient oracle on every component and, when the product has
/// total dimension at most two, cross-checks it against the grid search.
pub fn comparator_oracle(problem: &ConvexProblem, prefix: usize) -> Result<Comparator> {
    let m = &problem.manifold;
    let mut point = Vec::with_capacity(m.len());
    let mut value = 0.0;
    for (i, f) in m.factors().iter().enumerate() {
        let targets: Vec<&[f64]> = problem.targets[..prefix]
            .iter()
            .map(|p| p[i].as_slice())
            .collect();
        let (x, v) = karcher_minimizer(f, &targets, &problem.start[i])?;
        point.push(x);
        value += v;
    }
    let grid_value = if m.total_dim() <= 2 {
        let mut g = 0.0;
        for (i, f) in m.factors().iter().enumerate() {
            let targets: Vec<&[f64]> = problem.targets[..prefix]
                .iter()
                .map(|p| p[i].as_slice())
                .collect();
            g += grid_search(f, &targets)?.1;
        }
        if (g - value).abs() > AGREEMENT_TOL {
            return Err(Error::Oracle(format!(
                "gradient oracle ({value}) and grid search ({g}) disagree"
            )));
        }
        Some(g)
    } else {
        None
    };
    Ok(Comparator {
        point,
        value,
        grid_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::Component;

    #[test]
    fn euclidean_comparator_is_projected_mean() {
        let targets: Vec<ProductPoint> = [0.9, 0.5, -0.2, 0.7]
            .iter()
            .map(|&a| vec![vec![a], vec![a * 0.5]])
            .collect();
        let comps = [Component::euclidean(1), Component::euclidean(1)];
        let p = ConvexProblem::new(&comps, 1.0, targets).unwrap();
        let c = comparator_oracle(&p, 4).unwrap();
        assert!((c.point[0][0] - 0.475).abs() < 1e-9);
        assert!((c.point[1][0] - 0.2375).abs() < 1e-9);
        let expected = p.prefix_objective(4, &[vec![0.475], vec![0.2375]]).unwrap();
        assert!((c.value - expected).abs() < 1e-12);
        assert!(c.grid_value.is_some());
    }

    #[test]
    fn euclidean_mean_outside_the_interval_is_clamped() {
        let f = Factor {
            manifold: Component::euclidean(1),
            radius: Some(0.5),
        };
        let t = [[2.0], [3.0]];
        let targets: Vec<&[f64]> = t.iter().map(|a| a.as_slice()).collect();
        let (x, _) = karcher_minimizer(&f, &targets, &[0.0]).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_target_is_its_own_minimizer() {
        let f = Factor {
            manifold: Component::poincare(3),
            radius: Some(1.0),
        };
        let p = [0.1, -0.2, 0.3];
        let (x, v) = karcher_minimizer(&f, &[&p], &[0.0; 3]).unwrap();
        assert!(linalg::max_abs_diff(&x, &p) < 1e-9);
        assert!(v < 1e-18);
    }

    #[test]
    fn poincare_disk_oracles_agree() {
        let comps = [Component::poincare(2)];
        let p = ConvexProblem::random(&comps, 1.0, 3, 11).unwrap();
        let c = comparator_oracle(&p, 3).unwrap();
        let g = c.grid_value.unwrap();
        assert!((g - c.value).abs() < 1e-4);
        assert!(c.value <= g + 1e-12);
    }
}
