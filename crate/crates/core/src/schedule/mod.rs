//! Kernel IR construction, FIFO sizing and the analytic latency model.
//!
//! Every task is an II=1 pipeline over `N = ⌈W·H/v⌉` tokens. A task's latency
//! is `L = N + d`, where `d` is its pipeline fill: one cycle for streaming
//! kinds and `⌊k/2⌋·(W/v) + ⌈k/2⌉` for a k×k stencil, which must buffer `⌊k/2⌋`
//! rows before its first output. Run back to back the kernel takes `Σ L`; run
//! as a dataflow region it takes `N` plus the longest fill path.

mod ir;
mod latency;

use alloc::vec;
use alloc::vec::Vec;

pub use ir::*;
pub use latency::*;

/// Gives every channel without an explicit depth enough slots that no
/// producer stalls while its consumer waits for data on a slower sibling
/// path.
///
/// In steady state each task starts consuming at cycle `S` (one cycle after
/// its latest input produces its first token) and produces its first token
/// at `F = S + lookahead`. A channel `u → w` then holds `S(w) − F(u)` tokens
/// when the consumer starts, so it needs one more slot than that. Channels
/// never get fewer than `min_depth` slots.
pub fn size_fifos(ir: &mut KernelIr, min_depth: u32) {
    let first_out = first_output_cycles(ir);
    let start = start_cycles(ir, &first_out);
    for c in &mut ir.channels {
        if c.explicit_depth {
            continue;
        }
        let required = start[c.consumer] - first_out[c.producer] + 1;
        c.depth = u32::try_from(required).unwrap_or(u32::MAX).max(min_depth);
    }
}

// Tasks are in topological order, so one forward pass suffices.
fn first_output_cycles(ir: &KernelIr) -> Vec<u64> {
    let mut first_out: Vec<u64> = vec![0; ir.tasks.len()];
    for (i, t) in ir.tasks.iter().enumerate() {
        let s = t.in_channels().map(|c| first_out[ir.channels[c].producer] + 1).max().unwrap_or(0);
        first_out[i] = s + t.kind.lookahead_tokens(ir.width, ir.vector_length);
    }
    first_out
}

fn start_cycles(ir: &KernelIr, first_out: &[u64]) -> Vec<u64> {
    ir.tasks
        .iter()
        .map(|t| t.in_channels().map(|c| first_out[ir.channels[c].producer] + 1).max().unwrap_or(0))
        .collect()
}

#[cfg(test)]
mod tests;
