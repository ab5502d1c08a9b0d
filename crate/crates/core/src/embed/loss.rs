//! Softmax ranking loss over sampled negatives and its Euclidean gradient.

use std::collections::BTreeMap;

use crate::manifold::poincare;
use crate::{linalg, Error, Result};

/// One positive pair with its sampled negatives; `u` is the ancestor and
/// each negative replaces it.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub u: usize,
    pub v: usize,
    pub negatives: Vec<usize>,
}

/// Poincaré distance `arcosh(1 + 2‖x-y‖² / ((1-‖x‖²)(1-‖y‖²)))`.
pub fn distance(x: &[f64], y: &[f64]) -> f64 {
    let a = 1.0 - linalg::norm_sq(x);
    let b = 1.0 - linalg::norm_sq(y);
    let s = linalg::norm_sq(&linalg::sub(x, y));
    // arcosh(1 + z) = ln(1 + z + √(z(z+2))), accurate for small z
    let z = 2.0 * s / (a * b);
    (z + (z * (z + 2.0)).sqrt()).ln_1p()
}

/// Euclidean gradient of [`distance`] with respect to `x`.
pub fn distance_grad(x: &[f64], y: &[f64]) -> Vec<f64> {
    let a = 1.0 - linalg::norm_sq(x);
    let b = 1.0 - linalg::norm_sq(y);
    let s = linalg::norm_sq(&linalg::sub(x, y));
    let z = 2.0 * s / (a * b);
    // √(γ² - 1) with γ = 1 + z
    let root = (z * (z + 2.0)).sqrt();
    if root == 0.0 {
        return vec![0.0; x.len()];
    }
    let c = 4.0 / (b * root);
    let cx = (linalg::norm_sq(y) - 2.0 * linalg::dot(x, y) + 1.0) / (a * a);
    let cy = -1.0 / a;
    x.iter()
        .zip(y)
        .map(|(xi, yi)| c * (cx * xi + cy * yi))
        .collect()
}

/// Summed loss over `batch` and the sparse Euclidean gradient keyed by node.
///
/// Each example contributes `-log(exp(-d(u,v)) / Σ_{w ∈ {u} ∪ N} exp(-d(w,v)))`.
pub fn loss_and_grad(
    table: &[Vec<f64>],
    batch: &[Example],
) -> Result<(f64, BTreeMap<usize, Vec<f64>>)> {
    let mut total = 0.0;
    let mut grads: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for ex in batch {
        for &w in std::iter::once(&ex.u)
            .chain(&ex.negatives)
            .chain(std::iter::once(&ex.v))
        {
            poincare::conformal_factor(&table[w])?;
        }
        let v = &table[ex.v];
        let cands: Vec<usize> = std::iter::once(ex.u)
            .chain(ex.negatives.iter().copied())
            .collect();
        let d: Vec<f64> = cands.iter().map(|&w| distance(&table[w], v)).collect();
        let min = d.iter().copied().fold(f64::INFINITY, f64::min);
        let z: f64 = d.iter().map(|di| (min - di).exp()).sum();
        let loss = d[0] - min + z.ln();
        if !loss.is_finite() {
            return Err(Error::Divergence(format!(
                "non-finite loss on pair ({}, {})",
                ex.u, ex.v
            )));
        }
        total += loss;
        for (k, &w) in cands.iter().enumerate() {
            let p = (min - d[k]).exp() / z;
            let coef = if k == 0 { 1.0 - p } else { -p };
            if coef == 0.0 {
                continue;
            }
            let gw = distance_grad(&table[w], v);
            let gv = distance_grad(v, &table[w]);
            accumulate(&mut grads, w, coef, &gw);
            accumulate(&mut grads, ex.v, coef, &gv);
        }
    }
    Ok((total, grads))
}

fn accumulate(grads: &mut BTreeMap<usize, Vec<f64>>, node: usize, coef: f64, g: &[f64]) {
    let entry = grads.entry(node).or_insert_with(|| vec![0.0; g.len()]);
    entry.iter_mut().zip(g).for_each(|(e, gi)| *e += coef * gi);
}
