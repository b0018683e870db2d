//! File formats, study runner and property suite behind the `lieobs` binary.
//!
//! * [`scenario_file`]: the scenario text grammar, parse and serialize.
//! * [`builtins`]: embedded scenario files for the rigid-body studies.
//! * [`run`]: expands seed batches, simulates in parallel and writes
//!   CSVs plus a JSON manifest from a single thread.
//! * [`plot`]: gnuplot scripts laid out from a manifest.
//! * [`verify`]: the `verify` property suite.

pub mod builtins;
mod error;
pub mod output;
pub mod plot;
pub mod run;
pub mod scenario_file;
pub mod stats;
pub mod verify;

pub use error::{CliError, ParseError};
