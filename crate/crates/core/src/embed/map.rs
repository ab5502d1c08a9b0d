//! Mean average precision of ranking true ancestors among non-neighbours.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::graph::TaxonomyGraph;
use super::loss::distance;
use crate::{Error, Result};

/// MAP of `edges` under `table`.
///
/// Edges `(u, v)` are grouped by `v`. For each group the positives are
/// ranked by `d(u, v)` against every negative `u'` (no closure edge with
/// `v` in either direction, `u' ≠ v`); a negative at equal distance counts
/// as ranked ahead of the positive.
pub fn map_score(
    table: &[Vec<f64>],
    graph: &TaxonomyGraph,
    edges: &[(usize, usize)],
) -> Result<f64> {
    if edges.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    if table.len() != graph.len() {
        return Err(Error::ComponentCount {
            expected: graph.len(),
            got: table.len(),
        });
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(u, v) in edges {
        groups.entry(v).or_default().push(u);
    }
    let groups: Vec<(usize, Vec<usize>)> = groups.into_iter().collect();
    let aps: Vec<f64> = groups
        .par_iter()
        .map(|(v, pos)| {
            let v = *v;
            let mut neg: Vec<f64> = (0..graph.len())
                .filter(|&w| w != v && !graph.related(w, v))
                .map(|w| distance(&table[w], &table[v]))
                .collect();
            neg.sort_by(f64::total_cmp);
            let mut pd: Vec<f64> = pos
                .iter()
                .map(|&u| distance(&table[u], &table[v]))
                .collect();
            pd.sort_by(f64::total_cmp);
            average_precision(&pd, &neg)
        })
        .collect();
    Ok(aps.iter().sum::<f64>() / aps.len() as f64)
}

/// AP of sorted positive distances against sorted negative distances.
fn average_precision(pos: &[f64], neg: &[f64]) -> f64 {
    let mut ap = 0.0;
    for (j, &d) in pos.iter().enumerate() {
        let ahead = neg.partition_point(|&n| n <= d);
        let rank = j + 1;
        ap += rank as f64 / (rank + ahead) as f64;
    }
    ap / pos.len() as f64
}
