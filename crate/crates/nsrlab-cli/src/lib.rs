//! Command-line surface, field-container format, run configuration and JSON
//! reporting around the nsrlab diagnostics.

pub mod cli;
pub mod config;
pub mod container;
pub mod error;
pub mod report;
