//! Held-out closure edges for link prediction.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::graph::TaxonomyGraph;
use crate::{Error, Result};

/// Train and validation partitions of the closure.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Vec<(usize, usize)>,
    pub validation: Vec<(usize, usize)>,
}

/// Closure edges whose endpoints are neither roots nor leaves.
pub fn eligible_edges(graph: &TaxonomyGraph) -> Vec<(usize, usize)> {
    let inner = |w: usize| !graph.is_root(w) && !graph.is_leaf(w);
    graph
        .closure()
        .iter()
        .copied()
        .filter(|&(u, v)| inner(u) && inner(v))
        .collect()
}

/// Moves `round(fraction · #eligible)` eligible edges (at least one when
/// `fraction > 0`) into the validation set.
pub fn split_link_prediction(graph: &TaxonomyGraph, fraction: f64, seed: u64) -> Result<Split> {
    if !(0.0..0.5).contains(&fraction) {
        return Err(Error::Config(format!(
            "split fraction must lie in [0, 0.5), got {fraction}"
        )));
    }
    if graph.is_empty() {
        return Err(Error::Config("cannot split an empty graph".into()));
    }
    if fraction == 0.0 {
        return Ok(Split {
            train: graph.closure().to_vec(),
            validation: Vec::new(),
        });
    }
    let mut eligible = eligible_edges(graph);
    if eligible.is_empty() {
        return Err(Error::Config(
            "no closure edge avoids both roots and leaves".into(),
        ));
    }
    let count = ((fraction * eligible.len() as f64).round() as usize).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    eligible.shuffle(&mut rng);
    let mut validation = eligible[..count].to_vec();
    validation.sort_unstable();
    let train = graph
        .closure()
        .iter()
        .copied()
        .filter(|e| validation.binary_search(e).is_err())
        .collect();
    Ok(Split { train, validation })
}
