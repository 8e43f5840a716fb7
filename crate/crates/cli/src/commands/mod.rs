//! Subcommand implementations.

pub mod analytic;
pub mod classify;
pub mod correlate;
pub mod cqed;
pub mod simulate;
pub mod verify;
