//! Source generation from a [`KernelIr`]: Vitis HLS C++, OpenCL for Xilinx
//! and Intel, and the matching host programs.
//!
//! Task bodies are shared between the C++ and OpenCL outputs and differ only
//! in how tokens are read, written and indexed (see [`Dialect`]).

mod hls;
mod host;
mod ocl;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::frontend::expr::BinOp;
use crate::frontend::{Expr, Func, TaskKind};
use crate::schedule::{KernelIr, TaskIr};

pub use hls::emit_top_kernel;
pub use host::{emit_host, emit_host_with_binary};
pub use ocl::{emit_ocl_host, emit_ocl_kernel, Vendor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitKind {
    HlsCpp,
    OclXilinx,
    OclIntel,
    Host,
    LinkCfg,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedUnit {
    pub file_name: String,
    pub source_text: String,
    pub kind: UnitKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmitError {
    #[error("the kernel has no global memory ports, so there is nothing for a host to drive")]
    NoInterface,
    #[error("unsupported OpenCL vendor `{0}` (expected `xilinx` or `intel`)")]
    UnsupportedVendor(String),
}

/// Where a task's operand comes from or its result goes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Endpoint {
    Chan(String),
    Mem(String),
}

/// Target-specific spelling of the operations task bodies use.
pub(crate) trait Dialect {
    /// Token type name.
    fn tok(&self) -> &str;
    fn lanes(&self) -> u32;
    /// Expression for lane `l` of token variable `var`.
    fn lane(&self, var: &str, l: u32) -> String;
    /// Statement declaring `var` and reading one token from `from`.
    fn read(&self, var: &str, from: &Endpoint, index: &str) -> String;
    /// Statement writing token `var` to `to`.
    fn write(&self, to: &Endpoint, var: &str, index: &str) -> String;
    /// Lines placed before an II=1 loop header.
    fn before_pipelined_loop(&self) -> &[&str] {
        &[]
    }
    /// Lines placed first inside an II=1 loop body.
    fn inside_pipelined_loop(&self) -> &[&str] {
        &[]
    }
    /// Lines placed after declaring a stencil's row buffer.
    fn row_buffer_hints(&self) -> &[&str] {
        &[]
    }
}

/// Which helper functions the emitted code needs.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Helpers {
    div: bool,
    min: bool,
    max: bool,
    abs: bool,
    clamp: bool,
}

impl Helpers {
    pub(crate) fn for_ir(ir: &KernelIr) -> Helpers {
        let mut h = Helpers::default();
        for t in &ir.tasks {
            match &t.kind {
                TaskKind::Point(e) | TaskKind::Point2(e) => h.scan(e),
                TaskKind::Local(s) => {
                    h.clamp = true;
                    h.div |= s.divisor != 1;
                }
                _ => {}
            }
        }
        if h.clamp {
            h.min = true;
            h.max = true;
        }
        h
    }

    fn scan(&mut self, e: &Expr) {
        match e {
            Expr::Lit(_) | Expr::Operand(_) => {}
            Expr::Neg(a) => self.scan(a),
            Expr::Binary(op, a, b) => {
                self.div |= *op == BinOp::Div;
                self.scan(a);
                self.scan(b);
            }
            Expr::Call(f, args) => {
                match f {
                    Func::Min => self.min = true,
                    Func::Max => self.max = true,
                    Func::Abs => self.abs = true,
                    Func::Clamp => self.clamp = true,
                }
                args.iter().for_each(|a| self.scan(a));
            }
        }
    }

    /// The needed definitions followed by a blank line, or nothing.
    /// Integer semantics: division by zero yields 0, `INT_MIN / -1` wraps.
    pub(crate) fn render(&self) -> String {
        let mut out = String::new();
        if self.div {
            out.push_str("static inline int flw_div(int a, int b) { return b == 0 ? 0 : (b == -1 ? -a : a / b); }\n");
        }
        if self.min || self.clamp {
            out.push_str("static inline int flw_min(int a, int b) { return a < b ? a : b; }\n");
        }
        if self.max || self.clamp {
            out.push_str("static inline int flw_max(int a, int b) { return a > b ? a : b; }\n");
        }
        if self.abs {
            out.push_str("static inline int flw_abs(int a) { return a < 0 ? -a : a; }\n");
        }
        if self.clamp {
            out.push_str(
                "static inline int flw_clamp(int a, int lo, int hi) { return flw_min(flw_max(a, lo), hi); }\n",
            );
        }
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }
}

/// C rendering of `e`; operand `i` of lane `l` comes from `in{i}`.
pub(crate) fn render_expr(e: &Expr, d: &dyn Dialect, l: u32) -> String {
    match e {
        Expr::Lit(v) if *v == i32::MIN => "(-2147483647 - 1)".into(),
        Expr::Lit(v) if *v < 0 => format!("({v})"),
        Expr::Lit(v) => format!("{v}"),
        Expr::Operand(i) => d.lane(&format!("in{i}"), l),
        Expr::Neg(a) => format!("(-{})", render_expr(a, d, l)),
        Expr::Binary(BinOp::Div, a, b) => format!("flw_div({}, {})", render_expr(a, d, l), render_expr(b, d, l)),
        Expr::Binary(op, a, b) => format!("({} {} {})", render_expr(a, d, l), op.symbol(), render_expr(b, d, l)),
        Expr::Call(f, args) => {
            let args: Vec<String> = args.iter().map(|a| render_expr(a, d, l)).collect();
            format!("flw_{}({})", f.name(), args.join(", "))
        }
    }
}

/// The statements of a task function, indented one level.
pub(crate) fn task_body(
    d: &dyn Dialect,
    ir: &KernelIr,
    task: &TaskIr,
    reads: &[Endpoint],
    writes: &[Endpoint],
) -> String {
    match &task.kind {
        TaskKind::Local(s) => local_body(d, ir, s, &reads[0], &writes[0]),
        kind => streaming_body(d, ir, kind, reads, writes),
    }
}

fn streaming_body(d: &dyn Dialect, ir: &KernelIr, kind: &TaskKind, reads: &[Endpoint], writes: &[Endpoint]) -> String {
    let mut out = String::new();
    for line in d.before_pipelined_loop() {
        let _ = writeln!(out, "{line}");
    }
    let _ = writeln!(out, "    for (int i = 0; i < {}; i++) {{", ir.tokens());
    for line in d.inside_pipelined_loop() {
        let _ = writeln!(out, "{line}");
    }
    for (k, r) in reads.iter().enumerate() {
        let _ = writeln!(out, "        {}", d.read(&format!("in{k}"), r, "i"));
    }
    let result = match kind {
        TaskKind::Point(e) | TaskKind::Point2(e) => {
            let _ = writeln!(out, "        {} out;", d.tok());
            for l in 0..d.lanes() {
                let _ = writeln!(out, "        {} = {};", d.lane("out", l), render_expr(e, d, l));
            }
            "out"
        }
        _ => "in0",
    };
    for w in writes {
        let _ = writeln!(out, "        {}", d.write(w, result, "i"));
    }
    out.push_str("    }\n");
    out
}

/// Streaming k×k convolution. Input pixels go into a ring of `rows` image
/// rows; output token `j` is emitted once input token `j + la` has arrived,
/// where `la` is the stencil's lookahead. The ring holds every row an output
/// window can touch plus the rows read ahead.
fn local_body(d: &dyn Dialect, ir: &KernelIr, s: &crate::frontend::Stencil, from: &Endpoint, to: &Endpoint) -> String {
    let (w, h, v) = (ir.width, ir.height, ir.vector_length);
    let r = s.radius();
    let n = ir.tokens();
    let la = s.lookahead_tokens(w, v);
    let ring = ring_rows(r, w, v);
    let mut out = String::new();
    let _ = writeln!(out, "    int rows[{ring}][{w}];");
    for line in d.row_buffer_hints() {
        let _ = writeln!(out, "{line}");
    }
    for line in d.before_pipelined_loop() {
        let _ = writeln!(out, "{line}");
    }
    let _ = writeln!(out, "    for (int t = 0; t < {}; t++) {{", n + la);
    for line in d.inside_pipelined_loop() {
        let _ = writeln!(out, "{line}");
    }
    let _ = writeln!(out, "        if (t < {n}) {{");
    let _ = writeln!(out, "            {}", d.read("x", from, "t"));
    let _ = writeln!(out, "            int row = (t * {v}) / {w} % {ring};");
    let _ = writeln!(out, "            int col = (t * {v}) % {w};");
    for l in 0..v {
        let _ = writeln!(out, "            rows[row][col + {l}] = {};", d.lane("x", l));
    }
    out.push_str("        }\n");
    let _ = writeln!(out, "        if (t >= {la}) {{");
    let _ = writeln!(out, "            int j = t - {la};");
    let _ = writeln!(out, "            int y0 = (j * {v}) / {w};");
    let _ = writeln!(out, "            int x0 = (j * {v}) % {w};");
    let ri = r as i32;
    for dy in -ri..=ri {
        let used = (-ri..=ri).any(|dx| s.coeff(dy, dx) != 0);
        if used {
            let _ = writeln!(out, "            int ry{} = flw_clamp(y0 + ({dy}), 0, {}) % {ring};", dy + ri, h - 1);
        }
    }
    let _ = writeln!(out, "            {} out;", d.tok());
    for l in 0..v {
        out.push_str("            {\n");
        out.push_str("                int acc = 0;\n");
        for dy in -ri..=ri {
            for dx in -ri..=ri {
                let c = s.coeff(dy, dx);
                if c == 0 {
                    continue;
                }
                let _ = writeln!(
                    out,
                    "                acc += {c} * rows[ry{}][flw_clamp(x0 + ({}), 0, {})];",
                    dy + ri,
                    l as i32 + dx,
                    w - 1
                );
            }
        }
        let value = if s.divisor == 1 { "acc".into() } else { format!("flw_div(acc, {})", s.divisor) };
        let _ = writeln!(out, "                {} = {value};", d.lane("out", l));
        out.push_str("            }\n");
    }
    let _ = writeln!(out, "            {}", d.write(to, "out", "j"));
    out.push_str("        }\n");
    out.push_str("    }\n");
    out
}

/// Rows the stencil ring buffer needs: the `2r + 1` window rows plus those
/// the lookahead can reach into, `⌈(v·⌈r/v⌉ + v − 1) / W⌉` at most.
pub(crate) fn ring_rows(r: u32, width: u32, v: u32) -> u32 {
    let ahead = v * r.div_ceil(v) + v - 1;
    2 * r + 1 + ahead.div_ceil(width)
}

/// Name of the token type for `v` lanes in the HLS C++ output.
pub(crate) fn hls_token(v: u32) -> String {
    if v == 1 {
        "int".into()
    } else {
        format!("int{v}")
    }
}

#[cfg(test)]
mod tests;
