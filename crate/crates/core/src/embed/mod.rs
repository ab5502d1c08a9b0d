//! Poincaré embeddings of taxonomies: ingestion, negative sampling, the
//! softmax ranking loss, training and MAP evaluation.

pub mod checkpoint;
pub mod graph;
pub mod loss;
pub mod map;
pub mod sampler;
pub mod split;
pub mod train;

pub use checkpoint::Checkpoint;
pub use graph::{balanced_tree, TaxonomyGraph};
pub use loss::{loss_and_grad, Example};
pub use map::map_score;
pub use sampler::{NegativeMode, NegativeSampler};
pub use split::{eligible_edges, split_link_prediction, Split};
pub use train::{
    evaluate_map, initial_table, train, write_metrics, MetricRow, Phase, TrainConfig, TrainOutput,
    LR_GRID, METRIC_COLUMNS,
};
