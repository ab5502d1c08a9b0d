use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use riemopt::embed::{self, Checkpoint, TaxonomyGraph, TrainConfig, LR_GRID};
use riemopt::optim::{Method, UpdateMode};

use crate::error::{io_err, with_path, CliError, CliResult};
use crate::manifest::RunManifest;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TrainArgs {
    /// Edge list with one `child<TAB>parent` pair per line.
    #[arg(long)]
    pub edges: PathBuf,
    #[arg(long = "opt", default_value = "radam")]
    pub method: Method,
    /// `exp` or `retraction`.
    #[arg(long, default_value = "exp")]
    pub mode: UpdateMode,
    #[arg(long, default_value_t = 5)]
    pub dim: usize,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    /// Sweep these learning rates instead of `--lr`; without values the
    /// grid 0.001, 0.003, ..., 3.0 is used.
    #[arg(long, num_args = 0.., value_delimiter = ',')]
    pub lr_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.9)]
    pub beta1: f64,
    #[arg(long, default_value_t = 0.999)]
    pub beta2: f64,
    #[arg(long, default_value_t = riemopt::optim::DEFAULT_EPSILON)]
    pub eps: f64,
    /// Decay of beta1 for radamnc.
    #[arg(long, default_value_t = 0.99)]
    pub lambda: f64,
    #[arg(long, default_value_t = 10)]
    pub negatives: usize,
    /// Burn-in epochs.
    #[arg(long, default_value_t = 20)]
    pub burnin: usize,
    #[arg(long, default_value_t = 0.03)]
    pub burnin_lr: f64,
    #[arg(long, default_value_t = 32)]
    pub batch: usize,
    /// Fraction of eligible closure edges held out for link prediction.
    #[arg(long, default_value_t = 0.02)]
    pub split: f64,
    #[arg(long, default_value_t = 10)]
    pub eval_every: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "RIEMOPT_OUT_DIR", default_value = "runs")]
    pub out: PathBuf,
    /// Grid entries trained concurrently.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Write `wall_ms = 0` so reruns are byte-identical.
    #[arg(long)]
    pub deterministic: bool,
}

impl TrainArgs {
    fn config(&self, lr: f64) -> TrainConfig {
        TrainConfig {
            method: self.method,
            lr,
            beta1: self.beta1,
            beta2: self.beta2,
            lambda: self.lambda,
            epsilon: self.eps,
            mode: self.mode,
            dim: self.dim,
            epochs: self.epochs,
            negatives: self.negatives,
            burnin_epochs: self.burnin,
            burnin_lr: self.burnin_lr,
            batch_size: self.batch,
            split: self.split,
            eval_every: self.eval_every,
            seed: self.seed,
            deterministic: self.deterministic,
        }
    }

    fn learning_rates(&self) -> Vec<f64> {
        match &self.lr_grid {
            None => vec![self.lr],
            Some(g) if g.is_empty() => LR_GRID.to_vec(),
            Some(g) => g.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
struct GridEntry {
    lr: f64,
    status: String,
    final_loss: Option<f64>,
    map_reconstruction: Option<f64>,
    map_link_prediction: Option<f64>,
}

fn suffix(lr: f64, grid: bool) -> String {
    if grid {
        format!("_lr{lr}")
    } else {
        String::new()
    }
}

pub fn run(args: &TrainArgs) -> CliResult<()> {
    let lrs = args.learning_rates();
    let configs: Vec<TrainConfig> = lrs.iter().map(|&lr| args.config(lr)).collect();
    for c in &configs {
        c.validate()?;
    }
    if args.jobs == 0 {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    let graph = TaxonomyGraph::read(&args.edges).map_err(with_path(&args.edges))?;
    std::fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;
    let mut manifest = RunManifest::new("train", args, &configs, args.seed, &[&args.edges])?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let results: Vec<_> = pool.install(|| {
        configs
            .par_iter()
            .map(|c| embed::train(&graph, c))
            .collect()
    });

    let grid = args.lr_grid.is_some();
    let mut entries = Vec::new();
    let mut first_err = None;
    for (cfg, res) in configs.iter().zip(results) {
        let sfx = suffix(cfg.lr, grid);
        match res {
            Ok(out) => {
                let ckpt = args.out.join(format!("checkpoint{sfx}.tsv"));
                Checkpoint {
                    dim: cfg.dim,
                    curvature: -1.0,
                    names: graph.names().to_vec(),
                    points: out.table.clone(),
                }
                .save(&ckpt)?;
                let metrics = args.out.join(format!("metrics{sfx}.csv"));
                write_csv(&metrics, |w| embed::write_metrics(w, &out.metrics))?;
                let last_map = out
                    .metrics
                    .iter()
                    .rev()
                    .find(|r| r.map_reconstruction.is_some());
                let entry = GridEntry {
                    lr: cfg.lr,
                    status: "ok".into(),
                    final_loss: out.final_loss(),
                    map_reconstruction: last_map.and_then(|r| r.map_reconstruction),
                    map_link_prediction: last_map.and_then(|r| r.map_link_prediction),
                };
                println!(
                    "lr {}: final loss {}, map reconstruction {}, map link prediction {}",
                    cfg.lr,
                    show(entry.final_loss),
                    show(entry.map_reconstruction),
                    show(entry.map_link_prediction)
                );
                manifest.outputs.extend([ckpt, metrics]);
                entries.push(entry);
            }
            Err(e) => {
                eprintln!("lr {}: {e}", cfg.lr);
                entries.push(GridEntry {
                    lr: cfg.lr,
                    status: e.to_string(),
                    final_loss: None,
                    map_reconstruction: None,
                    map_link_prediction: None,
                });
                first_err.get_or_insert(e);
            }
        }
    }
    if grid {
        let path = args.out.join("grid.csv");
        write_csv(&path, |w| {
            use std::io::Write;
            writeln!(
                w,
                "lr,status,final_loss,map_reconstruction,map_link_prediction"
            )?;
            for e in &entries {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    e.lr,
                    if e.status == "ok" { "ok" } else { "failed" },
                    opt(e.final_loss),
                    opt(e.map_reconstruction),
                    opt(e.map_link_prediction)
                )?;
            }
            Ok(())
        })?;
        manifest.outputs.push(path);
    }
    manifest.write(&args.out)?;
    // a sweep succeeds when at least one entry trained
    match first_err {
        Some(e) if entries.iter().all(|e| e.status != "ok") => Err(e.into()),
        _ => Ok(()),
    }
}

fn show(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.6}"))
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub(crate) fn write_csv(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> riemopt::Result<()>,
) -> CliResult<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    use std::io::Write;
    w.flush().map_err(io_err(path))?;
    Ok(())
}
