//! Scenario harness for the chemcomp solver: configuration files, preset
//! experiments, CSV/snapshot output, and the epsilon sweep. The `chemcomp`
//! binary is a thin wrapper over this library so the integration tests can
//! drive the same code paths.

pub mod config;
pub mod io;
pub mod scenario;
pub mod sweep;

pub use config::{load_config, load_config_file, ConfigError, InitialCondition, ScenarioConfig, ScenarioKind};
pub use scenario::{make_initial, run_scenario, RunArtifacts, RunError, RunSummary};
pub use sweep::{sweep_epsilon, SweepRow};
