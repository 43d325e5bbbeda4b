use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::{hls_token, task_body, Dialect, EmittedUnit, Endpoint, Helpers, UnitKind};
use crate::schedule::{IrPort, KernelIr, TaskIr};

struct Hls {
    tok: String,
    lanes: u32,
}

impl Dialect for Hls {
    fn tok(&self) -> &str {
        &self.tok
    }

    fn lanes(&self) -> u32 {
        self.lanes
    }

    fn lane(&self, var: &str, l: u32) -> String {
        if self.lanes == 1 {
            var.into()
        } else {
            format!("{var}.e[{l}]")
        }
    }

    fn read(&self, var: &str, from: &Endpoint, index: &str) -> String {
        match from {
            Endpoint::Chan(c) => format!("{} {var} = {c}->read();", self.tok),
            Endpoint::Mem(m) => format!("{} {var} = {m}[{index}];", self.tok),
        }
    }

    fn write(&self, to: &Endpoint, var: &str, index: &str) -> String {
        match to {
            Endpoint::Chan(c) => format!("{c}->write({var});"),
            Endpoint::Mem(m) => format!("{m}[{index}] = {var};"),
        }
    }

    fn inside_pipelined_loop(&self) -> &[&str] {
        &["#pragma HLS PIPELINE II=1"]
    }

    fn row_buffer_hints(&self) -> &[&str] {
        &["#pragma HLS ARRAY_PARTITION variable = rows complete dim = 1"]
    }
}

/// The top-level Vitis HLS translation unit `<kernel>.cpp`: type
/// definitions, task prototypes, the pragma-annotated dataflow top function
/// calling every task in schedule order, then the task definitions.
pub fn emit_top_kernel(ir: &KernelIr) -> EmittedUnit {
    let v = ir.vector_length;
    let tok = hls_token(v);
    let chan_ty = format!("{tok}_chan");
    let extent = ir.tokens();
    let d = Hls { tok: tok.clone(), lanes: v };

    let mut out = String::from("#include <hls_stream.h>\n\n");
    if v > 1 {
        let _ = writeln!(out, "typedef struct {{ int e[{v}]; }} {tok};");
    }
    let _ = writeln!(out, "typedef hls::stream<{tok}> {chan_ty};\n");
    out.push_str(&Helpers::for_ir(ir).render());

    // Prototypes list parameter types in call order.
    for t in &ir.tasks {
        let mut params: Vec<String> = t.globals().map(|_| format!("{tok}[{extent}]")).collect();
        params.extend(t.in_channels().chain(t.out_channels()).map(|_| format!("{chan_ty}*")));
        let _ = writeln!(out, "void {}({});", t.name, params.join(", "));
    }
    out.push('\n');

    let ports: Vec<String> = ir.interfaces.iter().map(|p| format!("{tok} {}[{extent}]", p.port_name)).collect();
    let _ = writeln!(out, "void {}({}) {{", ir.kernel_name, ports.join(", "));
    for p in &ir.interfaces {
        let _ =
            writeln!(out, "#pragma HLS INTERFACE m_axi port = {} bundle = {} offset = slave", p.port_name, p.bundle);
        let _ = writeln!(out, "#pragma HLS INTERFACE s_axilite port = {}", p.port_name);
        let _ = writeln!(out, "#pragma HLS STABLE variable = {}", p.port_name);
    }
    out.push_str("#pragma HLS INTERFACE ap_ctrl_chain port = return\n");
    let _ = writeln!(out, "#pragma HLS top name = {}", ir.kernel_name);
    out.push_str("#pragma HLS DATAFLOW\n\n");
    if !ir.channels.is_empty() {
        let slots: Vec<String> = ir.channels.iter().map(|c| format!("{}_slot", c.name)).collect();
        let _ = writeln!(out, "    {chan_ty} {};", slots.join(", "));
        for c in &ir.channels {
            let _ = writeln!(out, "    {chan_ty}* {0} = &{0}_slot;", c.name);
        }
        for c in &ir.channels {
            let _ = writeln!(out, "#pragma HLS STREAM variable = {} depth = {}", c.name, c.depth);
        }
    }
    for t in &ir.tasks {
        let args: Vec<&str> = t
            .globals()
            .map(|g| ir.interfaces[g].port_name.as_str())
            .chain(t.in_channels().chain(t.out_channels()).map(|c| ir.channels[c].name.as_str()))
            .collect();
        let _ = writeln!(out, "    {}({});", t.name, args.join(", "));
    }
    out.push_str("}\n");

    for t in &ir.tasks {
        out.push('\n');
        out.push_str(&task_definition(&d, ir, t, &chan_ty));
    }

    EmittedUnit { file_name: format!("{}.cpp", ir.kernel_name), source_text: out, kind: UnitKind::HlsCpp }
}

fn task_definition(d: &Hls, ir: &KernelIr, t: &TaskIr, chan_ty: &str) -> String {
    // Memory parameters are numbered so they cannot collide with body locals.
    let mem_param = |g: usize| format!("mem{}", t.globals().position(|x| x == g).unwrap());
    let mut params: Vec<String> =
        t.globals().enumerate().map(|(k, _)| format!("{} mem{k}[{}]", d.tok, ir.tokens())).collect();
    params.extend(t.in_channels().chain(t.out_channels()).map(|c| format!("{chan_ty}* {}", ir.channels[c].name)));
    let endpoint = |p: &IrPort| match *p {
        IrPort::Global(g) => Endpoint::Mem(mem_param(g)),
        IrPort::Channel(c) => Endpoint::Chan(ir.channels[c].name.clone()),
    };
    let reads: Vec<Endpoint> = t.reads.iter().map(endpoint).collect();
    let writes: Vec<Endpoint> = t.writes.iter().map(endpoint).collect();
    let mut out = String::new();
    let _ = writeln!(out, "// {} ({})", t.source_name, t.kind.keyword());
    let _ = writeln!(out, "void {}({}) {{", t.name, params.join(", "));
    out.push_str(&task_body(d, ir, t, &reads, &writes));
    out.push_str("}\n");
    out
}
