//! Synthetic data, file formats, and the experiment runner behind the CLI.

pub mod config;
pub mod experiment;
pub mod io;
pub mod synth;

pub use config::{
    DatasetSource, ExperimentConfig, ModelConfig, OutputConfig, ReductionConfig, ReductionMode,
};
pub use experiment::{
    rows_csv, run_experiment, write_reports, ExperimentReport, Summary, TrialRow,
};
pub use io::{
    read_dataset, read_dataset_from, write_dataset, write_dataset_to, BundleJson, TruthJson,
};
pub use synth::{generate_synthetic, GroundTruth, SyntheticSpec};
