//! Command-line front end: spec files, reports and plots.

pub mod commands;
pub mod render;
pub mod report;
pub mod spec;
