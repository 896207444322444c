//! Command-line front end: config files, experiment sweeps and CSV tables.

pub mod config;
pub mod figures;
pub mod run;
pub mod table;
