//! Command-line driver: `run`, `verify`, `gen` and `serve`.

pub mod args;
pub mod exit;
pub mod gen;
pub mod run;
pub mod serve;
pub mod verify;
