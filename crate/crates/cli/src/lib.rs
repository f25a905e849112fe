//! File formats and command implementations behind the `hgs` binary.

pub mod commands;
pub mod format;
