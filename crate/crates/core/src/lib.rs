//! Core of the flower dataflow compiler.
//!
//! A `.flo` program describes an image pipeline as tasks connected by
//! channels. This crate turns it into a dataflow graph, checks the graph
//! against the canonical dataflow rules (acyclic, one producer and one
//! consumer per channel), rewrites it (vectorization, burst read/write
//! tasks, memory bundles and banks), orders it into a [`schedule::KernelIr`]
//! and renders Vitis HLS C++, OpenCL and host code from that IR.
//!
//! Two executors double as oracles: [`sim::run_reference`] evaluates a
//! program stage by stage, and [`sim::run_dataflow`] runs it cycle by cycle
//! over bounded FIFOs. [`schedule::estimate_kernel_latency`] is the analytic
//! latency model the cycle counts are checked against.
//!
//! The crate is `no_std` and only needs `alloc`. File IO and the command-line
//! driver live in the `flower` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod corpus;
pub mod emit;
pub mod frontend;
pub mod graph;
pub mod schedule;
pub mod sim;
pub mod transform;

pub use frontend::{parse_program, resolve, Program};
pub use graph::{extract_graph, topo_sort, validate, DataflowGraph};
pub use schedule::{build_kernel_ir, KernelIr, LatencyReport};

/// Line/column position in a source file, both 1-based. `Span::NONE` marks
/// declarations synthesized by transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub const NONE: Span = Span { line: 0, col: 0 };

    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }

    pub fn is_none(&self) -> bool {
        self.line == 0
    }
}

impl core::fmt::Display for Span {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}
