use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::frontend::{ImageId, Port, Program, TaskKind};
use crate::graph::{topo_sort, validate, DataflowGraph, GraphError};

use super::size_fifos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Read,
    Write,
}

/// One global-memory port of the top-level kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterfaceDesc {
    pub port_name: String,
    pub image: ImageId,
    pub image_name: String,
    /// Host file bound to the image.
    pub path: String,
    pub direction: Direction,
    pub bundle: String,
    pub bank: Option<u32>,
    pub bus_width_bits: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IrPort {
    /// Index into [`KernelIr::interfaces`].
    Global(usize),
    /// Index into [`KernelIr::channels`].
    Channel(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskIr {
    /// `task1`, `task2`, ... in schedule order.
    pub name: String,
    pub source_name: String,
    pub kind: TaskKind,
    /// Operand order is preserved: `reads[i]` feeds operand `i`.
    pub reads: Vec<IrPort>,
    pub writes: Vec<IrPort>,
}

impl TaskIr {
    /// Global ports in call order: reads first, then writes.
    pub fn globals(&self) -> impl Iterator<Item = usize> + '_ {
        self.reads.iter().chain(&self.writes).filter_map(|p| match p {
            IrPort::Global(g) => Some(*g),
            IrPort::Channel(_) => None,
        })
    }

    pub fn in_channels(&self) -> impl Iterator<Item = usize> + '_ {
        self.reads.iter().filter_map(|p| match p {
            IrPort::Channel(c) => Some(*c),
            IrPort::Global(_) => None,
        })
    }

    pub fn out_channels(&self) -> impl Iterator<Item = usize> + '_ {
        self.writes.iter().filter_map(|p| match p {
            IrPort::Channel(c) => Some(*c),
            IrPort::Global(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelIr {
    /// `chan1`, `chan2`, ... numbered by producer position.
    pub name: String,
    pub source_name: String,
    /// Task indices into [`KernelIr::tasks`].
    pub producer: usize,
    pub consumer: usize,
    pub depth: u32,
    /// Set when the source fixed the depth; sizing leaves it alone.
    pub explicit_depth: bool,
    pub lanes: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelIr {
    pub kernel_name: String,
    pub tasks: Vec<TaskIr>,
    pub channels: Vec<ChannelIr>,
    pub interfaces: Vec<InterfaceDesc>,
    pub vector_length: u32,
    pub width: u32,
    pub height: u32,
}

impl KernelIr {
    /// Tokens every channel and port carries.
    pub fn tokens(&self) -> u64 {
        (u64::from(self.width) * u64::from(self.height)).div_ceil(u64::from(self.vector_length))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IrError {
    #[error("invalid dataflow graph: {}", .0.iter().map(alloc::string::ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<GraphError>),
}

pub const DEFAULT_KERNEL_NAME: &str = "hls_top";

/// Orders the tasks, numbers channels and global ports and sizes the FIFOs.
pub fn build_kernel_ir(program: &Program, graph: &DataflowGraph) -> Result<KernelIr, IrError> {
    let report = validate(graph);
    if !report.is_ok() {
        return Err(IrError::Invalid(report.errors));
    }
    let order = topo_sort(graph);
    let mut position = alloc::vec![0usize; order.len()];
    for (i, t) in order.iter().enumerate() {
        position[t.0] = i;
    }

    // Global ports: accessed host images in declaration order.
    let accessed = |img: ImageId| {
        graph.memories.iter().any(|m| m.image == img && (!m.readers.is_empty() || !m.writers.is_empty()))
    };
    let host: Vec<ImageId> = program
        .images
        .iter()
        .enumerate()
        .map(|(i, _)| ImageId(i))
        .filter(|&i| program.image(i).is_host() && accessed(i))
        .collect();
    let n_in = host.iter().filter(|&&i| program.image(i).is_input()).count();
    let n_out = host.len() - n_in;
    let bus_width_bits = (32 * program.vector_length).min(512);
    let interfaces: Vec<InterfaceDesc> = host
        .iter()
        .map(|&i| {
            let img = program.image(i);
            let (direction, single, default_name) = if img.is_input() {
                (Direction::Read, n_in == 1, "input_data")
            } else {
                (Direction::Write, n_out == 1, "output_data")
            };
            InterfaceDesc {
                port_name: if single { default_name.into() } else { port_identifier(&img.name) },
                image: i,
                image_name: img.name.clone(),
                path: img.path().unwrap_or_default().into(),
                direction,
                bundle: "gmem0".into(),
                bank: None,
                bus_width_bits,
            }
        })
        .collect();
    let iface_of = |img: ImageId| interfaces.iter().position(|d| d.image == img).expect("accessed image has a port");

    // Channels numbered by producer position, then by the producer's write order.
    let mut chans: Vec<(usize, usize, crate::frontend::ChannelId)> = Vec::new();
    for (pos, t) in order.iter().enumerate() {
        for (k, port) in program.task(*t).writes.iter().enumerate() {
            if let Port::Channel(c) = port {
                chans.push((pos, k, *c));
            }
        }
    }
    let chan_index = |c: crate::frontend::ChannelId| chans.iter().position(|x| x.2 == c).unwrap();
    let channels: Vec<ChannelIr> = chans
        .iter()
        .enumerate()
        .map(|(i, &(pos, _, c))| {
            let edge = graph.edges.iter().find(|e| e.channel == c).unwrap();
            let decl = program.channel(c);
            ChannelIr {
                name: format!("chan{}", i + 1),
                source_name: decl.name.clone(),
                producer: pos,
                consumer: position[edge.consumer().unwrap().0],
                depth: decl.depth.unwrap_or(program.default_fifo_depth),
                explicit_depth: decl.depth.is_some(),
                lanes: program.vector_length,
            }
        })
        .collect();

    let map_port = |p: &Port| match *p {
        Port::Channel(c) => IrPort::Channel(chan_index(c)),
        Port::Image(i) => IrPort::Global(iface_of(i)),
    };
    let tasks = order
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let decl = program.task(*t);
            TaskIr {
                name: format!("task{}", i + 1),
                source_name: decl.name.clone(),
                kind: decl.kind.clone(),
                reads: decl.reads.iter().map(map_port).collect(),
                writes: decl.writes.iter().map(map_port).collect(),
            }
        })
        .collect();

    let mut ir = KernelIr {
        kernel_name: DEFAULT_KERNEL_NAME.into(),
        tasks,
        channels,
        interfaces,
        vector_length: program.vector_length,
        width: program.width,
        height: program.height,
    };
    size_fifos(&mut ir, program.default_fifo_depth);
    Ok(ir)
}

// Top-level names the emitters generate themselves; a port must not shadow
// them or a C/C++/OpenCL keyword.
fn port_identifier(image: &str) -> String {
    let generated = image.starts_with("task")
        || image.starts_with("chan")
        || image.starts_with("flw_")
        || image.starts_with("buffer_");
    if generated || RESERVED.contains(&image) {
        format!("{image}_data")
    } else {
        image.into()
    }
}

const RESERVED: &[&str] = &[
    "auto",
    "bool",
    "break",
    "case",
    "char",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extern",
    "float",
    "for",
    "goto",
    "if",
    "int",
    "long",
    "register",
    "return",
    "short",
    "signed",
    "sizeof",
    "static",
    "struct",
    "switch",
    "typedef",
    "union",
    "unsigned",
    "void",
    "volatile",
    "while",
    "class",
    "namespace",
    "new",
    "delete",
    "template",
    "this",
    "kernel",
    "global",
    "local",
    "constant",
    "private",
    "pipe",
    "restrict",
    "main",
    "hls_top",
    "input_data",
    "output_data",
    "tok_t",
    "width",
    "height",
    "context",
    "device",
    "program",
    "q",
    "bins",
];
