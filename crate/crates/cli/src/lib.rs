//! Command-line front end: argument handling, tabular and SVG output.

pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod svg;
pub mod table;
