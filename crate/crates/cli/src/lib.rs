//! Batch front-end for the side-information measures: state-spec parsing,
//! seeded runs and deterministic report emission.

pub mod args;
pub mod error;
pub mod report;
pub mod run;
pub mod spec;
pub mod verify;

pub use error::CliError;
pub use report::{Format, Record, Report};
pub use run::{run, Command, Outcome, RunSpec};
pub use spec::{parse_state_spec, StateSource};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
