//! Library half of the `weylscope` command-line tool.

pub mod commands;
pub mod error;
pub mod expr;
pub mod points;
pub mod report;
pub mod spec;
pub mod suites;
