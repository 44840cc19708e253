//! Benchmark examples, Monte Carlo ensembles, error metrics, sweeps and output.

pub mod config;
pub mod ensemble;
pub mod examples;
pub mod metrics;
pub mod output;
pub mod sweep;

pub use config::{ExperimentConfig, ForwardConfig};
pub use ensemble::{run_ensemble, EnsembleRun, ErrorReport, Setup};
pub use examples::ExampleId;
pub use metrics::{metric_e1, metric_e2, metric_e3, EvalGrid, Metrics};
pub use sweep::{sweep, SweepAxis, SweepRow};
