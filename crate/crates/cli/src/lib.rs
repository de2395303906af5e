//! Scenario files, sweeps, figure presets and the invariant suite around the
//! `wsms-crb` engine.

pub mod config;
pub mod presets;
pub mod run;
pub mod sweep;
pub mod validate;

pub use config::{ConfigError, ConfigMap, Method, ScenarioConfig};
pub use presets::{figure_records, Figure};
pub use run::{run_point, write_csv, Record, CSV_COLUMNS};
pub use sweep::{run_sweep, Axis, SweepSpec};
