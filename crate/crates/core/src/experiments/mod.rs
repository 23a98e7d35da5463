//! Seeded experiments: election sweeps, the influence-gap surface, per-cell
//! correlations and regressions.

pub mod config;
pub mod exec;
pub mod pcc;
pub mod regress;
pub mod stats;
pub mod surface;
pub mod sweep;

pub use exec::Execution;
pub use pcc::{pcc_curves, PccEntry, PccMetric};
pub use regress::{regress_records, ModelFit, RegressionModel};
pub use stats::{least_squares, ols_fit, pearson, LinearFit, RegressionResult};
pub use surface::{surface_mean_abs_gap, SurfaceConfig, SurfacePoint};
pub use sweep::{read_records, run_batch, write_records, CountRule, ElectionRecord, SweepConfig};
