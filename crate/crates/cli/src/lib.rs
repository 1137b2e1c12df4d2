//! Front ends for the singularity pipeline: file-based commands and an HTTP
//! service. Both render through the same functions, so a pose evaluated on
//! the command line and over HTTP yields byte-identical JSON.

pub mod commands;
pub mod service;
