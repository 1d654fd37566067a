//! Library surface of the command-line tool, split out so integration tests
//! can drive the commands directly.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
