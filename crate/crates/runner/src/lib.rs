//! Configuration, orchestration and output for the condensate simulations.

pub mod analysis;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod scenario;
pub mod verify;

pub use config::{parse_config, Parsed, ScenarioConfig};
pub use error::RunError;
pub use manifest::RunManifest;
pub use scenario::{run_scenario, run_with_jobs};
pub use verify::{verify_dir, Check};
