use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn riemopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riemopt"))
        .args(args)
        .env_remove("RIEMOPT_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// A complete binary tree of the given depth as `child<TAB>parent` lines.
fn write_tree(dir: &Path, depth: u32) -> PathBuf {
    let mut text = String::from("# binary tree\n");
    for i in 1..(1usize << depth) - 1 {
        text += &format!("n{i}\tn{}\n", (i - 1) / 2);
    }
    let path = dir.join("tree.tsv");
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn train_small(edges: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "train",
        "--edges",
        s(edges),
        "--out",
        s(out),
        "--dim",
        "2",
        "--epochs",
        "20",
        "--burnin",
        "5",
        "--split",
        "0",
        "--eval-every",
        "5",
        "--lr",
        "0.03",
        "--deterministic",
    ];
    args.extend_from_slice(extra);
    riemopt(&args)
}

#[test]
fn train_writes_checkpoint_metrics_and_manifest() {
    let dir = TempDir::new().unwrap();
    let edges = write_tree(dir.path(), 4);
    let out = dir.path().join("run");
    let o = train_small(&edges, &out, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    let mut lines = metrics.lines();
    assert_eq!(
        lines.next().unwrap(),
        "epoch,phase,train_loss,map_reconstruction,map_link_prediction,wall_ms"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 25);
    assert!(rows[0].starts_with("1,burnin,"));
    assert!(rows[24].starts_with("20,main,"));
    assert!(out.join("checkpoint.tsv").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "train");
    assert_eq!(manifest["seed"], 0);
}

#[test]
fn zero_epochs_write_the_initial_table() {
    let dir = TempDir::new().unwrap();
    let edges = write_tree(dir.path(), 3);
    let out = dir.path().join("run");
    let o = riemopt(&[
        "train",
        "--edges",
        s(&edges),
        "--out",
        s(&out),
        "--dim",
        "2",
        "--epochs",
        "0",
        "--burnin",
        "0",
        "--split",
        "0",
        "--deterministic",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let ckpt = fs::read_to_string(out.join("checkpoint.tsv")).unwrap();
    for row in ckpt.lines().skip(3) {
        for c in row.split('\t').skip(1) {
            assert!(c.parse::<f64>().unwrap().abs() <= 1e-3);
        }
    }
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 1);
}

#[test]
fn lr_grid_writes_one_log_per_rate() {
    let dir = TempDir::new().unwrap();
    let edges = write_tree(dir.path(), 3);
    let out = dir.path().join("grid");
    let o = train_small(&edges, &out, &["--lr-grid", "0.01", "0.1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for lr in ["0.01", "0.1"] {
        assert!(out.join(format!("metrics_lr{lr}.csv")).exists());
        assert!(out.join(format!("checkpoint_lr{lr}.tsv")).exists());
    }
    let grid = fs::read_to_string(out.join("grid.csv")).unwrap();
    assert_eq!(grid.lines().count(), 3);
}

#[test]
fn eval_reports_map_and_is_repeatable() {
    let dir = TempDir::new().unwrap();
    let edges = write_tree(dir.path(), 4);
    let run = dir.path().join("run");
    let o = riemopt(&[
        "train",
        "--edges",
        s(&edges),
        "--out",
        s(&run),
        "--dim",
        "2",
        "--epochs",
        "100",
        "--split",
        "0",
        "--lr",
        "0.03",
        "--deterministic",
    ]);
    assert!(o.status.success());
    let ckpt = run.join("checkpoint.tsv");
    let eval = |name: &str| {
        let o = riemopt(&[
            "eval",
            "--checkpoint",
            s(&ckpt),
            "--edges",
            s(&edges),
            "--out",
            s(&dir.path().join(name)),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };
    let first = eval("e1");
    assert!(first.contains("map_reconstruction\t1"), "{first}");
    assert_eq!(first, eval("e2"));
}

#[test]
fn eval_rejects_a_foreign_vocabulary() {
    let dir = TempDir::new().unwrap();
    let edges = write_tree(dir.path(), 3);
    let run = dir.path().join("run");
    assert!(train_small(&edges, &run, &[]).status.success());
    let other = dir.path().join("other.tsv");
    fs::write(&other, "x\ty\ny\tz\n").unwrap();
    let o = riemopt(&[
        "eval",
        "--checkpoint",
        s(&run.join("checkpoint.tsv")),
        "--edges",
        s(&other),
        "--out",
        s(&dir.path().join("e")),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bad_inputs_map_to_exit_codes() {
    let dir = TempDir::new().unwrap();
    let cyclic = dir.path().join("cycle.tsv");
    fs::write(&cyclic, "a\tb\nb\tc\nc\ta\n").unwrap();
    let out = dir.path().join("run");
    assert_eq!(train_small(&cyclic, &out, &[]).status.code(), Some(3));
    let edges = write_tree(dir.path(), 3);
    assert_eq!(
        train_small(&edges, &out, &["--negatives", "0"])
            .status
            .code(),
        Some(2)
    );
    let missing = dir.path().join("missing.tsv");
    assert_eq!(train_small(&missing, &out, &[]).status.code(), Some(3));
}

#[test]
fn regret_passes_its_bound() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("regret");
    let o = riemopt(&[
        "regret",
        "--opt",
        "ramsgrad",
        "--factors",
        "poincare:2",
        "--T",
        "500",
        "--seed",
        "7",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("PASS"));
    let csv = fs::read_to_string(out.join("regret.csv")).unwrap();
    assert!(csv.starts_with("t,loss,regret,bound,grad_norm_0"));
    assert!(out.join("regret.json").exists());
}

#[test]
fn regret_refuses_gamma_at_least_one() {
    let dir = TempDir::new().unwrap();
    // beta1² / sqrt(beta2) = 0.81 / 0.5 > 1
    let o = riemopt(&[
        "regret",
        "--opt",
        "ramsgrad",
        "--beta1",
        "0.9",
        "--beta2",
        "0.25",
        "--T",
        "20",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn amsgrad_on_flat_coordinates() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("flat");
    let o = riemopt(&[
        "regret",
        "--opt",
        "amsgrad",
        "--factors",
        "euclidean:3",
        "--T",
        "200",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let header: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("regret.json")).unwrap()).unwrap();
    assert_eq!(header["theorem"], "amsgrad");
    assert_eq!(header["kappas"], serde_json::json!([0.0, 0.0, 0.0]));
    assert_eq!(header["verdict"], "PASS");
}

#[test]
fn replay_reproduces_outputs() {
    let dir = TempDir::new().unwrap();
    let edges = write_tree(dir.path(), 4);
    let first = dir.path().join("first");
    let o = riemopt(&[
        "train",
        "--edges",
        s(&edges),
        "--out",
        s(&first),
        "--dim",
        "2",
        "--epochs",
        "10",
        "--burnin",
        "2",
        "--split",
        "0.1",
        "--seed",
        "3",
        "--deterministic",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let second = dir.path().join("second");
    let o = riemopt(&[
        "replay",
        s(&first.join("manifest.json")),
        "--out",
        s(&second),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["metrics.csv", "checkpoint.tsv"] {
        assert_eq!(
            fs::read(first.join(f)).unwrap(),
            fs::read(second.join(f)).unwrap(),
            "{f}"
        );
    }

    fs::write(&edges, "changed\tinput\n").unwrap();
    let o = riemopt(&[
        "replay",
        s(&first.join("manifest.json")),
        "--out",
        s(&second),
    ]);
    assert!(!o.status.success());
}
