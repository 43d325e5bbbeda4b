//! Command-line driver and file formats for the flower dataflow compiler.
//! The compiler itself is the `flower-core` crate.

pub mod cli;
pub mod diag;
pub mod pgm;

pub use flower_core as core;
