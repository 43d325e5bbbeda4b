//! Dataflow graph extraction, canonical-form validation and ordering.
//!
//! Every task is a node and every channel an edge. Host images are not
//! nodes; their accesses are recorded on the tasks that touch them and shown
//! as memory boxes in the DOT export.

mod dot;

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::frontend::{ChannelId, ImageId, Port, Program, TaskId, TaskKind};

pub use dot::to_dot;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskNode {
    pub task: TaskId,
    pub name: String,
    pub kind: &'static str,
    /// Indices into [`DataflowGraph::edges`].
    pub in_edges: Vec<usize>,
    pub out_edges: Vec<usize>,
    pub global_reads: Vec<ImageId>,
    pub global_writes: Vec<ImageId>,
}

/// A channel together with the tasks on either end. In a valid graph both
/// lists hold exactly one task; extraction keeps whatever the program says
/// so validation can report the violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelEdge {
    pub channel: ChannelId,
    pub name: String,
    pub producers: Vec<TaskId>,
    pub consumers: Vec<TaskId>,
    pub depth: u32,
}

impl ChannelEdge {
    pub fn producer(&self) -> Option<TaskId> {
        match self.producers.as_slice() {
            [p] => Some(*p),
            _ => None,
        }
    }

    pub fn consumer(&self) -> Option<TaskId> {
        match self.consumers.as_slice() {
            [c] => Some(*c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemoryNode {
    pub image: ImageId,
    pub name: String,
    pub is_input: bool,
    pub readers: Vec<TaskId>,
    pub writers: Vec<TaskId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataflowGraph {
    pub nodes: Vec<TaskNode>,
    pub edges: Vec<ChannelEdge>,
    pub memories: Vec<MemoryNode>,
    /// Declared channels no task touches; they get no edge.
    pub unused_channels: Vec<String>,
}

/// One node per task, one edge per used channel.
pub fn extract_graph(program: &Program) -> DataflowGraph {
    let mut edge_of: BTreeMap<ChannelId, usize> = BTreeMap::new();
    let mut edges: Vec<ChannelEdge> = Vec::new();
    let mut memories: Vec<MemoryNode> = program
        .images
        .iter()
        .enumerate()
        .filter(|(_, img)| img.is_host())
        .map(|(i, img)| MemoryNode {
            image: ImageId(i),
            name: img.name.clone(),
            is_input: img.is_input(),
            readers: Vec::new(),
            writers: Vec::new(),
        })
        .collect();
    let mut nodes: Vec<TaskNode> = Vec::with_capacity(program.tasks.len());

    // Edges are numbered in order of first mention so the DOT output follows
    // the source.
    let mut edge_index = |c: ChannelId, edges: &mut Vec<ChannelEdge>| -> usize {
        *edge_of.entry(c).or_insert_with(|| {
            let decl = program.channel(c);
            edges.push(ChannelEdge {
                channel: c,
                name: decl.name.clone(),
                producers: Vec::new(),
                consumers: Vec::new(),
                depth: decl.depth.unwrap_or(program.default_fifo_depth),
            });
            edges.len() - 1
        })
    };

    for (t, task) in program.tasks.iter().enumerate() {
        let id = TaskId(t);
        let mut node = TaskNode {
            task: id,
            name: task.name.clone(),
            kind: task.kind.keyword(),
            in_edges: Vec::new(),
            out_edges: Vec::new(),
            global_reads: Vec::new(),
            global_writes: Vec::new(),
        };
        for port in &task.reads {
            match *port {
                Port::Channel(c) => {
                    let e = edge_index(c, &mut edges);
                    edges[e].consumers.push(id);
                    node.in_edges.push(e);
                }
                Port::Image(i) => {
                    node.global_reads.push(i);
                    if let Some(m) = memories.iter_mut().find(|m| m.image == i) {
                        m.readers.push(id);
                    }
                }
            }
        }
        for port in &task.writes {
            match *port {
                Port::Channel(c) => {
                    let e = edge_index(c, &mut edges);
                    edges[e].producers.push(id);
                    node.out_edges.push(e);
                }
                Port::Image(i) => {
                    node.global_writes.push(i);
                    if let Some(m) = memories.iter_mut().find(|m| m.image == i) {
                        m.writers.push(id);
                    }
                }
            }
        }
        nodes.push(node);
    }

    let unused_channels = program
        .channels
        .iter()
        .enumerate()
        .filter(|(c, _)| !edge_of.contains_key(&ChannelId(*c)))
        .map(|(_, decl)| decl.name.clone())
        .collect();

    DataflowGraph { nodes, edges, memories, unused_channels }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Producer,
    Consumer,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("the program declares no tasks")]
    NoTasks,
    #[error("`{name}` is written by more than one task: {}", tasks.join(", "))]
    MultipleWriters { name: String, tasks: Vec<String> },
    #[error("channel `{channel}` is read by more than one task: {}", tasks.join(", "))]
    MultipleReaders { channel: String, tasks: Vec<String> },
    #[error("channel `{channel}` has no {}", match missing { Side::Producer => "producer", Side::Consumer => "consumer" })]
    DanglingChannel { channel: String, missing: Side },
    #[error("the graph has a cycle: {} -> {}", path.join(" -> "), path[0])]
    CyclicGraph { path: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphWarning {
    #[error("channel `{0}` is declared but never used")]
    UnusedChannel(String),
    #[error("image `{0}` is declared but never accessed")]
    UnusedImage(String),
    #[error("no task reads global memory")]
    NoGlobalRead,
    #[error("no task writes global memory")]
    NoGlobalWrite,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<GraphError>,
    pub warnings: Vec<GraphWarning>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Checks the canonical dataflow rules. Errors come in a fixed order:
/// missing tasks, per-channel violations in edge order, output images with
/// several writers, then at most one cycle.
pub fn validate(graph: &DataflowGraph) -> ValidationReport {
    let mut report = ValidationReport::default();
    if graph.nodes.is_empty() {
        report.errors.push(GraphError::NoTasks);
    }
    let names = |ids: &[TaskId]| ids.iter().map(|t| graph.nodes[t.0].name.clone()).collect::<Vec<_>>();

    for e in &graph.edges {
        match e.producers.len() {
            0 => report.errors.push(GraphError::DanglingChannel { channel: e.name.clone(), missing: Side::Producer }),
            1 => {}
            _ => report.errors.push(GraphError::MultipleWriters { name: e.name.clone(), tasks: names(&e.producers) }),
        }
        match e.consumers.len() {
            0 => report.errors.push(GraphError::DanglingChannel { channel: e.name.clone(), missing: Side::Consumer }),
            1 => {}
            _ => {
                report.errors.push(GraphError::MultipleReaders { channel: e.name.clone(), tasks: names(&e.consumers) })
            }
        }
    }
    for m in &graph.memories {
        if m.writers.len() > 1 {
            report.errors.push(GraphError::MultipleWriters { name: m.name.clone(), tasks: names(&m.writers) });
        }
    }
    if let Some(path) = find_cycle(graph) {
        report
            .errors
            .push(GraphError::CyclicGraph { path: path.iter().map(|t| graph.nodes[t.0].name.clone()).collect() });
    }

    for c in &graph.unused_channels {
        report.warnings.push(GraphWarning::UnusedChannel(c.clone()));
    }
    for m in &graph.memories {
        if m.readers.is_empty() && m.writers.is_empty() {
            report.warnings.push(GraphWarning::UnusedImage(m.name.clone()));
        }
    }
    if !graph.nodes.is_empty() {
        if graph.nodes.iter().all(|n| n.global_reads.is_empty()) {
            report.warnings.push(GraphWarning::NoGlobalRead);
        }
        if graph.nodes.iter().all(|n| n.global_writes.is_empty()) {
            report.warnings.push(GraphWarning::NoGlobalWrite);
        }
    }
    report
}

/// Task-level successors of every node, through any channel edge.
fn successors(graph: &DataflowGraph) -> Vec<Vec<usize>> {
    let mut succ = vec![Vec::new(); graph.nodes.len()];
    for e in &graph.edges {
        for p in &e.producers {
            for c in &e.consumers {
                succ[p.0].push(c.0);
            }
        }
    }
    for s in &mut succ {
        s.sort_unstable();
        s.dedup();
    }
    succ
}

/// First cycle met by a depth-first search started from each node in
/// declaration order, as the path from its entry node.
fn find_cycle(graph: &DataflowGraph) -> Option<Vec<TaskId>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    let succ = successors(graph);
    let mut mark = vec![Mark::White; succ.len()];
    for root in 0..succ.len() {
        if mark[root] != Mark::White {
            continue;
        }
        // Iterative DFS: (node, next successor position).
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        mark[root] = Mark::Grey;
        while let Some(&mut (n, ref mut pos)) = stack.last_mut() {
            if let Some(&m) = succ[n].get(*pos) {
                *pos += 1;
                match mark[m] {
                    Mark::White => {
                        mark[m] = Mark::Grey;
                        stack.push((m, 0));
                    }
                    Mark::Grey => {
                        let start = stack.iter().position(|&(k, _)| k == m).unwrap();
                        return Some(stack[start..].iter().map(|&(k, _)| TaskId(k)).collect());
                    }
                    Mark::Black => {}
                }
            } else {
                mark[n] = Mark::Black;
                stack.pop();
            }
        }
    }
    None
}

/// Kahn's algorithm, always taking the ready task declared first. The result
/// is the lexicographically smallest topological order by declaration index.
///
/// Panics if the graph has a cycle; call [`validate`] first.
pub fn topo_sort(graph: &DataflowGraph) -> Vec<TaskId> {
    let succ = successors(graph);
    let mut indegree = vec![0usize; succ.len()];
    for s in &succ {
        for &m in s {
            indegree[m] += 1;
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> = (0..succ.len()).filter(|&n| indegree[n] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(succ.len());
    while let Some(Reverse(n)) = ready.pop() {
        order.push(TaskId(n));
        for &m in &succ[n] {
            indegree[m] -= 1;
            if indegree[m] == 0 {
                ready.push(Reverse(m));
            }
        }
    }
    assert_eq!(order.len(), succ.len(), "topo_sort called on a cyclic graph");
    order
}

impl DataflowGraph {
    pub fn node(&self, t: TaskId) -> &TaskNode {
        &self.nodes[t.0]
    }

    /// Edges with exactly one producer and one consumer, as task pairs.
    pub fn task_edges(&self) -> impl Iterator<Item = (TaskId, TaskId, &ChannelEdge)> {
        self.edges.iter().filter_map(|e| Some((e.producer()?, e.consumer()?, e)))
    }
}

/// Whether `kind` only forwards data (shown differently in DOT output).
pub(crate) fn is_split(kind: &str) -> bool {
    kind == TaskKind::Split(2).keyword()
}
