//! Configuration, presets, snapshots and the command drivers.

pub mod config;
pub mod presets;
pub mod run;
pub mod snapshot;
pub mod verify;

pub use config::{parse_config, parse_config_str, Preset, RunConfig, SolverKind};
pub use run::{run, run_in, RunOutcome, RunStatus};
pub use snapshot::{load_snapshot, read_snapshot, save_snapshot, write_snapshot, SnapshotHeader};
pub use verify::{verify, Suite, VerifyReport};
