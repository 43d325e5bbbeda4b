use alloc::string::String;
use alloc::vec::Vec;

use super::expr::Expr;
use crate::Span;

/// FIFO slots given to a channel that carries no `depth` attribute.
pub const DEFAULT_FIFO_DEPTH: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChannelId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ImageId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaskId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelDecl {
    pub name: String,
    /// Pixels per token; equals the program's vector length once vectorized.
    pub elem_width: u32,
    /// Explicit FIFO depth from the source, if any.
    pub depth: Option<u32>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImageBinding {
    HostInput(String),
    HostOutput(String),
    Virtual(ChannelId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageDecl {
    pub name: String,
    pub width: u32,
    pub height: u32,
    pub binding: ImageBinding,
    pub span: Span,
}

impl ImageDecl {
    pub fn is_host(&self) -> bool {
        !matches!(self.binding, ImageBinding::Virtual(_))
    }

    pub fn is_input(&self) -> bool {
        matches!(self.binding, ImageBinding::HostInput(_))
    }

    pub fn is_output(&self) -> bool {
        matches!(self.binding, ImageBinding::HostOutput(_))
    }

    pub fn path(&self) -> Option<&str> {
        match &self.binding {
            ImageBinding::HostInput(p) | ImageBinding::HostOutput(p) => Some(p),
            ImageBinding::Virtual(_) => None,
        }
    }
}

/// A task operand after resolution: virtual images have been replaced by
/// their channels, so `Image` always names a host image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Port {
    Channel(ChannelId),
    Image(ImageId),
}

/// Square convolution mask, row-major, normalized by `divisor`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stencil {
    pub size: u32,
    pub coeffs: Vec<i32>,
    pub divisor: i32,
}

impl Stencil {
    pub fn radius(&self) -> u32 {
        self.size / 2
    }

    pub fn coeff(&self, dy: i32, dx: i32) -> i32 {
        let r = self.radius() as i32;
        let row = (dy + r) as usize;
        let col = (dx + r) as usize;
        self.coeffs[row * self.size as usize + col]
    }

    /// Input tokens a streaming implementation must have consumed beyond
    /// output token `j` before it can emit `j`: `r` full rows plus the `r`
    /// pixels to the right, rounded up to whole tokens.
    pub fn lookahead_tokens(&self, width: u32, vector_length: u32) -> u64 {
        let r = u64::from(self.radius());
        let v = u64::from(vector_length);
        r * (u64::from(width) / v) + r.div_ceil(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TaskKind {
    Point(Expr),
    Point2(Expr),
    Local(Stencil),
    Split(u32),
    /// Burst read: streams a host image into channels.
    Read,
    /// Burst write: drains a channel into a host image.
    Write,
}

impl TaskKind {
    pub fn keyword(&self) -> &'static str {
        match self {
            TaskKind::Point(_) => "point",
            TaskKind::Point2(_) => "point2",
            TaskKind::Local(_) => "local",
            TaskKind::Split(_) => "split",
            TaskKind::Read => "read",
            TaskKind::Write => "write",
        }
    }

    pub fn is_burst(&self) -> bool {
        matches!(self, TaskKind::Read | TaskKind::Write)
    }

    /// See [`Stencil::lookahead_tokens`]; zero for every non-stencil kind.
    pub fn lookahead_tokens(&self, width: u32, vector_length: u32) -> u64 {
        match self {
            TaskKind::Local(s) => s.lookahead_tokens(width, vector_length),
            _ => 0,
        }
    }

    /// Human-readable arity rule, used in diagnostics.
    pub fn arity_rule(&self) -> &'static str {
        match self {
            TaskKind::Point(_) => "exactly 1 read and 1 write",
            TaskKind::Point2(_) => "exactly 2 reads and 1 write",
            TaskKind::Local(_) => "exactly 1 read and 1 write",
            TaskKind::Split(_) => "exactly 1 read and as many writes as the fan-out (at least 2)",
            TaskKind::Read => "exactly 1 read and at least 1 write",
            TaskKind::Write => "exactly 1 read and 1 write",
        }
    }

    pub fn arity_ok(&self, reads: usize, writes: usize) -> bool {
        match self {
            TaskKind::Point(_) | TaskKind::Local(_) | TaskKind::Write => reads == 1 && writes == 1,
            TaskKind::Point2(_) => reads == 2 && writes == 1,
            TaskKind::Split(n) => reads == 1 && writes >= 2 && writes == *n as usize,
            TaskKind::Read => reads == 1 && writes >= 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskDecl {
    pub name: String,
    pub kind: TaskKind,
    pub reads: Vec<Port>,
    pub writes: Vec<Port>,
    pub span: Span,
}

/// A resolved program: every name bound, all images `width × height`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub channels: Vec<ChannelDecl>,
    pub images: Vec<ImageDecl>,
    pub tasks: Vec<TaskDecl>,
    pub vector_length: u32,
    pub width: u32,
    pub height: u32,
    pub default_fifo_depth: u32,
}

impl Program {
    pub fn channel(&self, id: ChannelId) -> &ChannelDecl {
        &self.channels[id.0]
    }

    pub fn image(&self, id: ImageId) -> &ImageDecl {
        &self.images[id.0]
    }

    pub fn task(&self, id: TaskId) -> &TaskDecl {
        &self.tasks[id.0]
    }

    pub fn task_by_name(&self, name: &str) -> Option<TaskId> {
        self.tasks.iter().position(|t| t.name == name).map(TaskId)
    }

    pub fn channel_by_name(&self, name: &str) -> Option<ChannelId> {
        self.channels.iter().position(|c| c.name == name).map(ChannelId)
    }

    pub fn image_by_name(&self, name: &str) -> Option<ImageId> {
        self.images.iter().position(|i| i.name == name).map(ImageId)
    }

    pub fn port_name(&self, port: Port) -> &str {
        match port {
            Port::Channel(c) => &self.channel(c).name,
            Port::Image(i) => &self.image(i).name,
        }
    }

    /// Tokens carried by every channel: `W·H / v`.
    pub fn tokens(&self) -> u64 {
        (u64::from(self.width) * u64::from(self.height)).div_ceil(u64::from(self.vector_length))
    }

    pub fn pixels(&self) -> usize {
        self.width as usize * self.height as usize
    }

    /// True if `name` is taken by a channel, image or task.
    pub fn name_in_use(&self, name: &str) -> bool {
        self.channels.iter().any(|c| c.name == name)
            || self.images.iter().any(|i| i.name == name)
            || self.tasks.iter().any(|t| t.name == name)
    }

    /// `base` if free, else `base_1`, `base_2`, ...
    pub fn fresh_name(&self, base: &str) -> String {
        if !self.name_in_use(base) {
            return base.into();
        }
        (1..).map(|i| alloc::format!("{base}_{i}")).find(|n| !self.name_in_use(n)).expect("unbounded search")
    }

    /// Same program with every image resized to `width × height`.
    pub fn with_dimensions(&self, width: u32, height: u32) -> Program {
        let mut p = self.clone();
        p.width = width;
        p.height = height;
        for img in &mut p.images {
            img.width = width;
            img.height = height;
        }
        p
    }

    /// Declared input images, in declaration order.
    pub fn host_inputs(&self) -> impl Iterator<Item = (ImageId, &ImageDecl)> {
        self.images.iter().enumerate().filter(|(_, i)| i.is_input()).map(|(k, i)| (ImageId(k), i))
    }

    pub fn host_outputs(&self) -> impl Iterator<Item = (ImageId, &ImageDecl)> {
        self.images.iter().enumerate().filter(|(_, i)| i.is_output()).map(|(k, i)| (ImageId(k), i))
    }
}
