use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::frontend::TaskKind;

use super::{KernelIr, TaskIr};

/// Pipeline fill of one task in cycles.
pub fn fill_depth(kind: &TaskKind, width: u32, vector_length: u32) -> u64 {
    match kind {
        TaskKind::Local(s) => {
            let k = u64::from(s.size);
            (k / 2) * (u64::from(width) / u64::from(vector_length)) + k.div_ceil(2)
        }
        _ => 1,
    }
}

/// `(L, d)` for one task over a `width × height` image.
pub fn estimate_task_latency(task: &TaskIr, width: u32, height: u32, vector_length: u32) -> (u64, u64) {
    let n = (u64::from(width) * u64::from(height)).div_ceil(u64::from(vector_length));
    let d = fill_depth(&task.kind, width, vector_length);
    (n + d, d)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskLatency {
    pub name: String,
    pub source_name: String,
    pub latency: u64,
    pub fill: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatencyReport {
    pub per_task: Vec<TaskLatency>,
    pub kernel_sequential: u64,
    pub kernel_dataflow: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportMode {
    Sequential,
    Dataflow,
    #[default]
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EstimateError {
    #[error("no task named `{0}`")]
    UnknownTask(String),
}

/// Both kernel latencies. `overrides` pins `L` of individual tasks, looked up
/// by source name or by schedule name (`task3`).
///
/// The dataflow latency is the largest `N_k + P_k` over all tasks, where
/// `N_k = L_k − d_k` is the task's streaming time and `P_k` the longest sum
/// of fills along a path through it. Without overrides every `N_k` is `N`
/// and this is `N` plus the longest fill path; with no edges it is `max L_k`.
pub fn estimate_kernel_latency(ir: &KernelIr, overrides: &[(String, u64)]) -> Result<LatencyReport, EstimateError> {
    let mut per_task: Vec<TaskLatency> = ir
        .tasks
        .iter()
        .map(|t| {
            let (latency, fill) = estimate_task_latency(t, ir.width, ir.height, ir.vector_length);
            TaskLatency { name: t.name.clone(), source_name: t.source_name.clone(), latency, fill }
        })
        .collect();
    for (name, latency) in overrides {
        let t = per_task
            .iter_mut()
            .find(|t| &t.source_name == name || &t.name == name)
            .ok_or_else(|| EstimateError::UnknownTask(name.clone()))?;
        t.latency = *latency;
    }

    let n = per_task.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for c in &ir.channels {
        preds[c.consumer].push(c.producer);
    }
    // Longest fill path ending at each task (inclusive), then starting after it.
    let mut upto = vec![0u64; n];
    for i in 0..n {
        upto[i] = per_task[i].fill + preds[i].iter().map(|&p| upto[p]).max().unwrap_or(0);
    }
    let mut after = vec![0u64; n];
    for i in (0..n).rev() {
        for c in ir.channels.iter().filter(|c| c.producer == i) {
            after[i] = after[i].max(per_task[c.consumer].fill + after[c.consumer]);
        }
    }
    let kernel_dataflow =
        (0..n).map(|i| per_task[i].latency.saturating_sub(per_task[i].fill) + upto[i] + after[i]).max().unwrap_or(0);
    let kernel_sequential = per_task.iter().map(|t| t.latency).sum();
    Ok(LatencyReport { per_task, kernel_sequential, kernel_dataflow })
}

impl LatencyReport {
    /// `task=<name> L=<n> d=<n>` per task, then the kernel totals.
    pub fn to_kv(&self, mode: ReportMode) -> String {
        let mut out = String::new();
        for t in &self.per_task {
            let _ = writeln!(out, "task={} L={} d={}", t.source_name, t.latency, t.fill);
        }
        if mode != ReportMode::Dataflow {
            let _ = writeln!(out, "sequential={}", self.kernel_sequential);
        }
        if mode != ReportMode::Sequential {
            let _ = writeln!(out, "dataflow={}", self.kernel_dataflow);
        }
        out
    }

    pub fn to_table(&self, mode: ReportMode) -> String {
        let w = self.per_task.iter().map(|t| t.source_name.len()).max().unwrap_or(0).max("kernel (sequential)".len());
        let mut out = String::new();
        let _ = writeln!(out, "{:<w$}  {:>8}  {:>12}  {:>8}", "task", "schedule", "L", "d");
        for t in &self.per_task {
            let _ = writeln!(out, "{:<w$}  {:>8}  {:>12}  {:>8}", t.source_name, t.name, t.latency, t.fill);
        }
        if mode != ReportMode::Dataflow {
            let _ = writeln!(out, "{:<w$}  {:>8}  {:>12}", "kernel (sequential)", "", self.kernel_sequential);
        }
        if mode != ReportMode::Sequential {
            let _ = writeln!(out, "{:<w$}  {:>8}  {:>12}", "kernel (dataflow)", "", self.kernel_dataflow);
        }
        if mode == ReportMode::Both && self.kernel_dataflow > 0 {
            let speedup = self.kernel_sequential as f64 / self.kernel_dataflow as f64;
            let _ = writeln!(out, "{:<w$}  {:>8}  {:>11.2}x", "speedup", "", speedup);
        }
        out
    }
}
