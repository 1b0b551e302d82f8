//! Data loading, experiment running and reporting for `rpens-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod fetch;
pub mod loader;
pub mod model;
pub mod report;
pub mod runner;
pub mod synthetic;

pub use config::{DataSource, ExperimentConfig, MethodId, MethodSpec};
pub use error::{HarnessError, Result};
pub use loader::{load_csv, CsvOptions};
pub use model::{fit_method, FittedModel, ModelFile};
pub use report::{emit_report, ExperimentReport, ReportFormat};
pub use runner::{b1_sweep, run_experiment};
pub use synthetic::{generate_synthetic, SyntheticModel, SyntheticSpec};
