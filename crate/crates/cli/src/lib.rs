//! Command implementations behind the `forestplan` binary. Each command
//! writes to the sinks it is given and returns the process exit code.

pub mod commands;
pub mod files;
pub mod report;
