//! Configuration, trace files, batch runs and property suites behind the
//! `geo-smc` command.

pub mod config;
pub mod runner;
pub mod summary;
pub mod trace;
pub mod verify;
