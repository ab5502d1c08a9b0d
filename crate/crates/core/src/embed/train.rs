//! Two-phase training of Poincaré embeddings: an RSGD burn-in with
//! retraction updates, then the configured optimizer.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::graph::TaxonomyGraph;
use super::loss::{loss_and_grad, Example};
use super::map::map_score;
use super::sampler::{NegativeMode, NegativeSampler};
use super::split::{split_link_prediction, Split};
use crate::manifold::{Component, Manifold, ProductManifold, ProductPoint};
use crate::optim::{HyperParams, Method, RiemannianOptimizer, UpdateMode, DEFAULT_EPSILON};
use crate::{Error, Result};

/// Learning rates swept in the experiments.
pub const LR_GRID: [f64; 8] = [0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0];

/// Half-width of the uniform initialization box.
pub const INIT_SCALE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub method: Method,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// `β₁` decay factor, used by RADAMNC only.
    pub lambda: f64,
    pub epsilon: f64,
    pub mode: UpdateMode,
    pub dim: usize,
    pub epochs: usize,
    pub negatives: usize,
    pub burnin_epochs: usize,
    pub burnin_lr: f64,
    pub batch_size: usize,
    /// Fraction of eligible closure edges held out for link prediction.
    pub split: f64,
    /// MAP is evaluated every `eval_every` main epochs and after the last
    /// one; 0 evaluates after the last epoch only.
    pub eval_every: usize,
    pub seed: u64,
    /// Report `wall_ms = 0` so that metric logs are byte-identical.
    pub deterministic: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            method: Method::Radam,
            lr: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            lambda: 0.99,
            epsilon: DEFAULT_EPSILON,
            mode: UpdateMode::Exponential,
            dim: 5,
            epochs: 100,
            negatives: 10,
            burnin_epochs: 20,
            burnin_lr: 0.03,
            batch_size: 32,
            split: 0.02,
            eval_every: 10,
            seed: 0,
            deterministic: false,
        }
    }
}

impl TrainConfig {
    pub fn hyper(&self) -> HyperParams {
        HyperParams::for_method(self.method, self.lr, self.beta1, self.beta2, self.lambda)
            .with_mode(self.mode)
            .with_epsilon(self.epsilon)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.dim == 0 {
            return bad("dimension must be at least 1".into());
        }
        if self.negatives == 0 {
            return bad("at least one negative per positive is required".into());
        }
        if self.batch_size == 0 {
            return bad("batch size must be at least 1".into());
        }
        if !(0.0..0.5).contains(&self.split) {
            return bad(format!(
                "split fraction must lie in [0, 0.5), got {}",
                self.split
            ));
        }
        if !(self.burnin_lr.is_finite() && self.burnin_lr > 0.0) {
            return bad(format!(
                "burn-in learning rate must be positive, got {}",
                self.burnin_lr
            ));
        }
        self.method.check(&self.hyper())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Burnin,
    Main,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Burnin => "burnin",
            Phase::Main => "main",
        })
    }
}

/// One row of the metric log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    /// 1-based epoch within its phase.
    pub epoch: usize,
    pub phase: Phase,
    /// Mean loss per positive pair over the epoch.
    pub train_loss: f64,
    pub map_reconstruction: Option<f64>,
    pub map_link_prediction: Option<f64>,
    pub wall_ms: u64,
}

pub const METRIC_COLUMNS: [&str; 6] = [
    "epoch",
    "phase",
    "train_loss",
    "map_reconstruction",
    "map_link_prediction",
    "wall_ms",
];

/// Writes the metric log as CSV; metrics that were not evaluated in an
/// epoch are left empty.
pub fn write_metrics<W: Write>(mut w: W, rows: &[MetricRow]) -> Result<()> {
    writeln!(w, "{}", METRIC_COLUMNS.join(","))?;
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.epoch,
            r.phase,
            r.train_loss,
            opt(r.map_reconstruction),
            opt(r.map_link_prediction),
            r.wall_ms
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub table: ProductPoint,
    pub metrics: Vec<MetricRow>,
    pub split: Split,
}

impl TrainOutput {
    /// Train loss of the last epoch, whichever phase it belongs to.
    pub fn final_loss(&self) -> Option<f64> {
        self.metrics.last().map(|r| r.train_loss)
    }

    pub fn final_map(&self) -> Option<f64> {
        self.metrics.iter().rev().find_map(|r| r.map_reconstruction)
    }
}

/// Every coordinate uniform in `[-INIT_SCALE, INIT_SCALE]`.
pub fn initial_table(nodes: usize, dim: usize, seed: u64) -> ProductPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..nodes)
        .map(|_| {
            (0..dim)
                .map(|_| rng.gen_range(-INIT_SCALE..=INIT_SCALE))
                .collect()
        })
        .collect()
}

struct Run<'a> {
    graph: &'a TaxonomyGraph,
    manifold: ProductManifold,
    sampler: NegativeSampler,
    pairs: Vec<(usize, usize)>,
    negatives: usize,
    batch_size: usize,
    rng: ChaCha8Rng,
}

impl Run<'_> {
    /// One shuffled pass over the training pairs; returns the mean loss.
    fn epoch(
        &mut self,
        opt: &mut RiemannianOptimizer,
        table: &mut ProductPoint,
        mode: NegativeMode,
    ) -> Result<f64> {
        self.pairs.shuffle(&mut self.rng);
        let mut total = 0.0;
        for chunk in self.pairs.chunks(self.batch_size) {
            let batch = chunk
                .iter()
                .map(|&(u, v)| {
                    // small graphs may offer fewer non-neighbours than requested
                    let k = self.negatives.min(self.sampler.candidates(v).len());
                    if k == 0 {
                        return Err(Error::Sampling(format!(
                            "node `{}` has no eligible negatives",
                            self.graph.name(v)
                        )));
                    }
                    Ok(Example {
                        u,
                        v,
                        negatives: self.sampler.sample(&mut self.rng, v, mode, k)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let (loss, egrads) = loss_and_grad(table, &batch)?;
            total += loss;
            let rgrads = egrads
                .into_iter()
                .map(|(i, g)| {
                    Ok((
                        i,
                        self.manifold
                            .factor(i)
                            .manifold
                            .egrad_to_rgrad(&table[i], &g)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let updates: Vec<(usize, &[f64])> =
                rgrads.iter().map(|(i, g)| (*i, g.as_slice())).collect();
            opt.step_sparse(&self.manifold, table, &updates)
                .map_err(|e| match e {
                    Error::NonFiniteGradient { component } => Error::Divergence(format!(
                        "non-finite gradient for node `{}`",
                        self.graph.name(component)
                    )),
                    e => e,
                })?;
        }
        let mean = total / self.pairs.len().max(1) as f64;
        if !mean.is_finite() {
            return Err(Error::Divergence(format!("epoch loss is {mean}")));
        }
        Ok(mean)
    }
}

/// Trains an embedding of `graph` and logs loss and MAP per epoch.
pub fn train(graph: &TaxonomyGraph, config: &TrainConfig) -> Result<TrainOutput> {
    config.validate()?;
    let start = Instant::now();
    let wall = || {
        if config.deterministic {
            0
        } else {
            start.elapsed().as_millis() as u64
        }
    };
    let split = split_link_prediction(graph, config.split, config.seed)?;
    let mut table = initial_table(graph.len(), config.dim, config.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);
    let mut run = Run {
        graph,
        manifold: ProductManifold::uniform(Component::poincare(config.dim), graph.len(), None),
        sampler: NegativeSampler::new(graph),
        pairs: split.train.clone(),
        negatives: config.negatives,
        batch_size: config.batch_size,
        rng,
    };
    let mut metrics = Vec::new();

    let burnin_hyper = HyperParams::rsgd(config.burnin_lr).with_mode(UpdateMode::Retraction);
    let mut burnin = RiemannianOptimizer::new(Method::Rsgd, burnin_hyper, &run.manifold)?;
    for epoch in 1..=config.burnin_epochs {
        let loss = run
            .epoch(&mut burnin, &mut table, NegativeMode::Degree)
            .map_err(|e| annotate(e, Phase::Burnin, epoch))?;
        metrics.push(MetricRow {
            epoch,
            phase: Phase::Burnin,
            train_loss: loss,
            map_reconstruction: None,
            map_link_prediction: None,
            wall_ms: wall(),
        });
    }

    let mut opt = RiemannianOptimizer::new(config.method, config.hyper(), &run.manifold)?;
    for epoch in 1..=config.epochs {
        let loss = run
            .epoch(&mut opt, &mut table, NegativeMode::Uniform)
            .map_err(|e| annotate(e, Phase::Main, epoch))?;
        let evaluate =
            epoch == config.epochs || (config.eval_every > 0 && epoch % config.eval_every == 0);
        let (recon, link) = if evaluate {
            evaluate_map(&table, graph, &split)?
        } else {
            (None, None)
        };
        metrics.push(MetricRow {
            epoch,
            phase: Phase::Main,
            train_loss: loss,
            map_reconstruction: recon,
            map_link_prediction: link,
            wall_ms: wall(),
        });
    }
    Ok(TrainOutput {
        table,
        metrics,
        split,
    })
}

/// Reconstruction MAP over the training pairs and link-prediction MAP over
/// the held-out pairs, each absent when its edge set is empty.
pub fn evaluate_map(
    table: &[Vec<f64>],
    graph: &TaxonomyGraph,
    split: &Split,
) -> Result<(Option<f64>, Option<f64>)> {
    let score = |edges: &[(usize, usize)]| {
        if edges.is_empty() {
            Ok(None)
        } else {
            map_score(table, graph, edges).map(Some)
        }
    };
    Ok((score(&split.train)?, score(&split.validation)?))
}

fn annotate(e: Error, phase: Phase, epoch: usize) -> Error {
    match e {
        Error::Divergence(msg) => Error::Divergence(format!("{phase} epoch {epoch}: {msg}")),
        e => e,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::graph::balanced_tree;

    fn small() -> TrainConfig {
        TrainConfig {
            dim: 2,
            epochs: 3,
            burnin_epochs: 2,
            negatives: 3,
            split: 0.0,
            deterministic: true,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn no_epochs_leaves_initialization() {
        let g = balanced_tree(2, 3).unwrap();
        let cfg = TrainConfig {
            epochs: 0,
            burnin_epochs: 0,
            ..small()
        };
        let out = train(&g, &cfg).unwrap();
        assert_eq!(out.table, initial_table(g.len(), 2, cfg.seed));
        assert!(out.metrics.is_empty());
    }

    #[test]
    fn metric_rows_per_phase() {
        let g = balanced_tree(2, 3).unwrap();
        let out = train(&g, &small()).unwrap();
        let phases: Vec<Phase> = out.metrics.iter().map(|r| r.phase).collect();
        assert_eq!(
            phases,
            [
                Phase::Burnin,
                Phase::Burnin,
                Phase::Main,
                Phase::Main,
                Phase::Main
            ]
        );
        assert!(out.metrics[4].map_reconstruction.is_some());
        assert!(out.metrics[4].map_link_prediction.is_none());
        let mut csv = Vec::new();
        write_metrics(&mut csv, &out.metrics).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with(
            "epoch,phase,train_loss,map_reconstruction,map_link_prediction,wall_ms\n"
        ));
        assert_eq!(text.lines().count(), 6);
    }

    #[test]
    fn invalid_config() {
        let g = balanced_tree(2, 3).unwrap();
        for cfg in [
            TrainConfig {
                negatives: 0,
                ..small()
            },
            TrainConfig {
                split: 0.5,
                ..small()
            },
            TrainConfig {
                lr: -1.0,
                ..small()
            },
        ] {
            assert!(matches!(train(&g, &cfg), Err(Error::Config(_))));
        }
    }
}
