//! Negative sampling over non-neighbours of a node.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::graph::TaxonomyGraph;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeMode {
    /// Probability proportional to `degree^0.75`.
    Degree,
    Uniform,
}

impl FromStr for NegativeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "degree" | "degree_0.75" => Ok(NegativeMode::Degree),
            "uniform" => Ok(NegativeMode::Uniform),
            _ => Err(Error::Config(format!(
                "unknown negative-sampling mode `{s}`"
            ))),
        }
    }
}

impl fmt::Display for NegativeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NegativeMode::Degree => "degree_0.75",
            NegativeMode::Uniform => "uniform",
        })
    }
}

/// Per-node candidate lists: every `u ≠ v` with no closure edge between
/// `u` and `v` in either direction.
#[derive(Debug, Clone)]
pub struct NegativeSampler {
    candidates: Vec<Vec<usize>>,
    weights: Vec<f64>,
}

impl NegativeSampler {
    pub fn new(graph: &TaxonomyGraph) -> Self {
        let n = graph.len();
        let candidates = (0..n)
            .map(|v| (0..n).filter(|&u| u != v && !graph.related(u, v)).collect())
            .collect();
        let weights = graph
            .degrees()
            .iter()
            .map(|&d| (d as f64).powf(0.75))
            .collect();
        Self {
            candidates,
            weights,
        }
    }

    pub fn candidates(&self, v: usize) -> &[usize] {
        &self.candidates[v]
    }

    /// Sampling weight of node `u` under [`NegativeMode::Degree`].
    pub fn degree_weight(&self, u: usize) -> f64 {
        self.weights[u]
    }

    /// Draws `k` distinct negatives for `v` without replacement.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        v: usize,
        mode: NegativeMode,
        k: usize,
    ) -> Result<Vec<usize>> {
        if k == 0 {
            return Ok(Vec::new());
        }
        let pool = &self.candidates[v];
        let short = |have: usize| {
            Error::Sampling(format!(
                "node {v} has {have} eligible negatives, {k} requested"
            ))
        };
        match mode {
            NegativeMode::Uniform => {
                if pool.len() < k {
                    return Err(short(pool.len()));
                }
                Ok(pool.choose_multiple(rng, k).copied().collect())
            }
            NegativeMode::Degree => {
                let positive = pool.iter().filter(|&&u| self.weights[u] > 0.0).count();
                if positive < k {
                    return Err(short(positive));
                }
                let picked = pool
                    .choose_multiple_weighted(rng, k, |&u| self.weights[u])
                    .map_err(|e| Error::Sampling(e.to_string()))?;
                Ok(picked.copied().collect())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn star_plus_isolated() -> TaxonomyGraph {
        // center c with leaves l0..l3, plus an unrelated pair x -> y
        TaxonomyGraph::parse("l0\tc\nl1\tc\nl2\tc\nl3\tc\ny\tx\n".as_bytes()).unwrap()
    }

    #[test]
    fn star_center_draws_only_disconnected_nodes() {
        let g = star_plus_isolated();
        let s = NegativeSampler::new(&g);
        let c = g.id("c").unwrap();
        let mut expected = vec![g.id("x").unwrap(), g.id("y").unwrap()];
        expected.sort_unstable();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for mode in [NegativeMode::Uniform, NegativeMode::Degree] {
            for _ in 0..100 {
                let mut neg = s.sample(&mut rng, c, mode, 2).unwrap();
                neg.sort_unstable();
                assert_eq!(neg, expected);
            }
        }
        assert!(matches!(
            s.sample(&mut rng, c, NegativeMode::Uniform, 3),
            Err(Error::Sampling(_))
        ));
        assert!(s
            .sample(&mut rng, c, NegativeMode::Uniform, 0)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn leaf_negatives_are_distinct_non_neighbours() {
        let g = star_plus_isolated();
        let s = NegativeSampler::new(&g);
        let v = g.id("l0").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let neg = s.sample(&mut rng, v, NegativeMode::Uniform, 5).unwrap();
            let mut d = neg.clone();
            d.sort_unstable();
            d.dedup();
            assert_eq!(d.len(), 5);
            assert!(neg.iter().all(|&u| u != v && !g.related(u, v)));
        }
    }
}
