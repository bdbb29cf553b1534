//! IO, file formats and command-line wiring around
//! [`sceneminer_core`]: parsers for category lists, label files,
//! detector outputs and transaction tables, table/graph exporters, a
//! deterministic multi-worker miner, and the `sceneminer` binary.

pub mod config;
pub mod export;
pub mod ingest;
pub mod parallel;
pub mod synthspec;
