//! Configuration-driven front end for the ramsey-zne experiment runner:
//! JSON configs, figure presets, CSV emission, and simple SVG plots.

pub mod commands;
pub mod config;
pub mod csv_io;
pub mod presets;
pub mod runner;
pub mod svg;

pub use commands::{cmd_plot, cmd_preset, cmd_run, CliError, GlobalOpts, RunManifest};
