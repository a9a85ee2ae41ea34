//! Experiment runner and validation suites behind the `tpost` binary.

pub mod config;
pub mod experiment;
pub mod validate;

pub use config::{ContaminationSpec, ExperimentConfig, ModelSpec, SearchSpec, TuningSpec};
pub use experiment::{
    run_experiment, write_outputs, ExperimentOutput, ReplicationRecord, SummaryReport,
};
pub use validate::{run_validation, Suite, TuningSummary, ValidationSummary};

/// Runs `f` on a rayon pool capped by `TPOST_THREADS` when that is set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match std::env::var("TPOST_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}
