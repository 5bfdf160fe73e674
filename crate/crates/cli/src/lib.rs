//! Command-line front end: model files, reports and plots.

pub mod commands;
pub mod modelfile;
pub mod plot;
pub mod report;
