//! Accuracy and syntax-error metrics, k-fold cross-validation over the
//! result grid, and report rendering.

mod cv;
mod methods;
mod metrics;
mod report;

pub use cv::{
    fold_seed, run_cross_validation, run_grid, CellResult, Experiment, FoldMetrics, GridCell, GRID_HIDDEN_DIMS,
};
pub use methods::{corpus_lexicon, w2v10_config, Method};
pub use metrics::{evaluate, judge, Metrics};
pub use report::{published, render_report, results_from_json, results_to_json, LITERATURE};
