//! Support library for the `orbitee` binary: scenario files, result files,
//! weight checkpoints and the self-check suite.

pub mod checkpoint;
pub mod config_file;
pub mod output;
pub mod verify;
