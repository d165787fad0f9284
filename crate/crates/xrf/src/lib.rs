//! Scenario plumbing behind the `xrf` command line tool: config parsing,
//! the tabulated ion presets, command implementations, and deterministic
//! text output. The binary in `main.rs` only adds argument parsing and exit
//! codes on top of this.

pub mod commands;
pub mod config;
pub mod output;
pub mod scenario;
