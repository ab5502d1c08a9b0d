use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use riemopt::embed::{evaluate_map, split_link_prediction, Checkpoint, TaxonomyGraph};

use crate::error::{io_err, with_path, CliError, CliResult};
use crate::manifest::RunManifest;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub edges: PathBuf,
    /// Held-out fraction used at training time; with the training seed it
    /// reproduces the link-prediction split.
    #[arg(long, default_value_t = 0.0)]
    pub split: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "RIEMOPT_OUT_DIR", default_value = "runs")]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct EvalReport {
    map_reconstruction: Option<f64>,
    map_link_prediction: Option<f64>,
    reconstruction_edges: usize,
    link_prediction_edges: usize,
}

pub fn run(args: &EvalArgs) -> CliResult<()> {
    let graph = TaxonomyGraph::read(&args.edges).map_err(with_path(&args.edges))?;
    let ckpt = Checkpoint::load(&args.checkpoint).map_err(with_path(&args.checkpoint))?;
    let table = align(&graph, &ckpt)?;
    let split = split_link_prediction(&graph, args.split, args.seed)?;
    let (recon, link) = evaluate_map(&table, &graph, &split)?;
    let report = EvalReport {
        map_reconstruction: recon,
        map_link_prediction: link,
        reconstruction_edges: split.train.len(),
        link_prediction_edges: split.validation.len(),
    };
    if let Some(m) = recon {
        println!("map_reconstruction\t{m}");
    }
    if let Some(m) = link {
        println!("map_link_prediction\t{m}");
    }

    std::fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;
    let path = args.out.join("eval.json");
    std::fs::write(&path, serde_json::to_string_pretty(&report)? + "\n").map_err(io_err(&path))?;
    let mut manifest = RunManifest::new(
        "eval",
        args,
        &serde_json::json!({ "split": args.split, "seed": args.seed }),
        args.seed,
        &[&args.edges, &args.checkpoint],
    )?;
    manifest.outputs.push(path);
    manifest.write(&args.out)?;
    Ok(())
}

/// Reorders checkpoint rows into graph order; both must name the same nodes.
fn align(graph: &TaxonomyGraph, ckpt: &Checkpoint) -> CliResult<Vec<Vec<f64>>> {
    if ckpt.curvature != -1.0 {
        return Err(CliError::Data(format!(
            "checkpoint curvature {} is not -1",
            ckpt.curvature
        )));
    }
    if ckpt.names.len() != graph.len() {
        return Err(CliError::Data(format!(
            "vocabulary mismatch: checkpoint has {} nodes, graph has {}",
            ckpt.names.len(),
            graph.len()
        )));
    }
    let mut table = vec![None; graph.len()];
    for (name, p) in ckpt.names.iter().zip(&ckpt.points) {
        let id = graph.id(name).ok_or_else(|| {
            CliError::Data(format!("vocabulary mismatch: `{name}` is not in the graph"))
        })?;
        if table[id].is_some() {
            return Err(CliError::Data(format!(
                "node `{name}` appears twice in the checkpoint"
            )));
        }
        let norm = p.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm.is_nan() || norm >= 1.0 {
            return Err(CliError::Data(format!(
                "node `{name}` has norm {norm}, outside the ball"
            )));
        }
        table[id] = Some(p.clone());
    }
    Ok(table
        .into_iter()
        .map(|p| p.expect("all names matched"))
        .collect())
}
