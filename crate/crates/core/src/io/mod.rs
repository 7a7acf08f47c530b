//! Configuration files, CSV tables and binary snapshots.

pub mod config;
pub mod csv;
pub mod snapshot;
