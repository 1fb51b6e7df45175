//! Seeded experiment runs: the four-model sample-efficiency sweep and the
//! DAG-misspecification study, with CSV reports.

mod config;
mod perturb;
mod report;
mod runner;

pub use config::{DagMode, DagVariantSpec, ExperimentConfig, ModelKind, TrainOverrides};
pub use perturb::{legal_perturbations, perturb_dag, perturb_variants};
pub use report::{emit_reports, read_runs_csv, summarize, write_runs_csv, SummaryRow, RUNS_HEADER};
pub use runner::{
    build_query_sets, run_robustness, run_robustness_on, run_sweep, run_sweep_on, train_seed, training_data,
    DagVariant, QuerySets, RunRecord,
};
