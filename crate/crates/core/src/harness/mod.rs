//! Configuration, data generation, experiment orchestration and CSV output.

pub mod checks;
mod config;
mod data;
mod experiments;
mod records;

pub use checks::{run_suite, CheckOutcome, Suite};
pub use config::{
    load_config, parse_config, ExperimentConfig, ExperimentKind, MirrorChoice, PotentialChoice, SamplerChoice,
};
pub use data::{dataset_from_csv, dataset_to_csv, generate_logistic_data, read_dataset, write_dataset};
pub use experiments::{
    build_target, cloud_at, logistic_data, random_quadratic, run_chains, run_experiment, run_experiment_blr, run_experiment_dirichlet,
    run_experiment_simplex_quadratic, run_single, simplex_quadratic_reference, Target, REJECTION_MAX_DIM,
};
pub use records::{
    read_csv, records_from_csv, records_to_csv, sort_records, trial_average, write_csv, RunRecord, TrialAverage,
    CSV_HEADER,
};
