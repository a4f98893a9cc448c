//! Library side of the `birank` command-line tool: state-file serialization
//! and the command implementations. The binary in `main.rs` only parses
//! arguments and prints what these functions return.

pub mod commands;
pub mod statefile;
