use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;
use core::str::FromStr;

use super::host::PGM_HELPERS;
use super::{task_body, Dialect, EmitError, EmittedUnit, Endpoint, Helpers, UnitKind};
use crate::schedule::{Direction, IrPort, KernelIr, TaskIr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vendor {
    Xilinx,
    Intel,
}

impl FromStr for Vendor {
    type Err = EmitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "xilinx" => Ok(Vendor::Xilinx),
            "intel" => Ok(Vendor::Intel),
            _ => Err(EmitError::UnsupportedVendor(s.to_string())),
        }
    }
}

impl Vendor {
    fn unit_kind(self) -> UnitKind {
        match self {
            Vendor::Xilinx => UnitKind::OclXilinx,
            Vendor::Intel => UnitKind::OclIntel,
        }
    }

    fn binary_ext(self) -> &'static str {
        match self {
            Vendor::Xilinx => "xclbin",
            Vendor::Intel => "aocx",
        }
    }
}

/// Xilinx pipes need a power-of-two depth of at least 16.
pub(crate) fn xilinx_pipe_depth(depth: u32) -> u32 {
    depth.max(16).next_power_of_two()
}

struct Ocl {
    vendor: Vendor,
    lanes: u32,
}

impl Dialect for Ocl {
    fn tok(&self) -> &str {
        "tok_t"
    }

    fn lanes(&self) -> u32 {
        self.lanes
    }

    fn lane(&self, var: &str, l: u32) -> String {
        if self.lanes == 1 {
            var.into()
        } else {
            format!("{var}.s{l:x}")
        }
    }

    fn read(&self, var: &str, from: &Endpoint, index: &str) -> String {
        match (from, self.vendor) {
            (Endpoint::Mem(m), _) => format!("tok_t {var} = {m}[{index}];"),
            (Endpoint::Chan(c), Vendor::Intel) => format!("tok_t {var} = read_channel_intel({c});"),
            (Endpoint::Chan(c), Vendor::Xilinx) => format!("tok_t {var}; read_pipe_block({c}, &{var});"),
        }
    }

    fn write(&self, to: &Endpoint, var: &str, index: &str) -> String {
        match (to, self.vendor) {
            (Endpoint::Mem(m), _) => format!("{m}[{index}] = {var};"),
            (Endpoint::Chan(c), Vendor::Intel) => format!("write_channel_intel({c}, {var});"),
            (Endpoint::Chan(c), Vendor::Xilinx) => format!("write_pipe_block({c}, &{var});"),
        }
    }

    fn before_pipelined_loop(&self) -> &[&str] {
        match self.vendor {
            Vendor::Xilinx => &["    __attribute__((xcl_pipeline_loop(1)))"],
            Vendor::Intel => &["    #pragma ii 1"],
        }
    }
}

fn ocl_token(v: u32) -> String {
    if v == 1 {
        "int".into()
    } else {
        format!("int{v}")
    }
}

/// Kernels `emit_ocl_host` launches, in launch order.
fn launched(ir: &KernelIr, vendor: Vendor, dataflow: bool) -> Vec<(String, Vec<String>)> {
    if !dataflow {
        let mut args: Vec<String> = ir.interfaces.iter().map(|p| p.port_name.clone()).collect();
        args.extend(ir.channels.iter().map(|c| c.name.clone()));
        return alloc::vec![(ir.kernel_name.clone(), args)];
    }
    ir.tasks
        .iter()
        .filter(|t| vendor == Vendor::Xilinx || t.globals().next().is_some())
        .map(|t| (t.name.clone(), t.globals().map(|g| ir.interfaces[g].port_name.clone()).collect()))
        .collect()
}

/// OpenCL kernel source. With `dataflow` each task becomes its own kernel
/// connected by pipes (Xilinx) or channels (Intel; tasks without global
/// ports run as autorun kernels). Without it a single kernel runs the tasks
/// one after another through scratch buffers in global memory.
pub fn emit_ocl_kernel(ir: &KernelIr, vendor: Vendor, dataflow: bool) -> EmittedUnit {
    let v = ir.vector_length;
    let d = Ocl { vendor, lanes: v };
    let mut out = String::new();
    if dataflow && vendor == Vendor::Intel && !ir.channels.is_empty() {
        out.push_str("#pragma OPENCL EXTENSION cl_intel_channels : enable\n\n");
    }
    let _ = writeln!(out, "typedef {} tok_t;\n", ocl_token(v));
    out.push_str(&Helpers::for_ir(ir).render());

    if dataflow {
        for c in &ir.channels {
            let _ = match vendor {
                Vendor::Intel => writeln!(out, "channel tok_t {} __attribute__((depth({})));", c.name, c.depth),
                Vendor::Xilinx => writeln!(
                    out,
                    "pipe tok_t {} __attribute__((xcl_reqd_pipe_depth({})));",
                    c.name,
                    xilinx_pipe_depth(c.depth)
                ),
            };
        }
        if !ir.channels.is_empty() {
            out.push('\n');
        }
        for (k, t) in ir.tasks.iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            out.push_str(&dataflow_kernel(&d, ir, t));
        }
    } else {
        for t in &ir.tasks {
            out.push_str(&naive_task(&d, ir, t));
            out.push('\n');
        }
        let mut params: Vec<String> = ir
            .interfaces
            .iter()
            .map(|p| match p.direction {
                Direction::Read => format!("__global const tok_t* restrict {}", p.port_name),
                Direction::Write => format!("__global tok_t* restrict {}", p.port_name),
            })
            .collect();
        params.extend(ir.channels.iter().map(|c| format!("__global tok_t* restrict {}", c.name)));
        if vendor == Vendor::Xilinx {
            out.push_str("__attribute__((reqd_work_group_size(1, 1, 1)))\n");
        } else {
            out.push_str("__attribute__((max_global_work_dim(0)))\n");
        }
        let _ = writeln!(out, "__kernel void {}({}) {{", ir.kernel_name, params.join(", "));
        for t in &ir.tasks {
            let args: Vec<&str> = t.reads.iter().chain(&t.writes).map(|p| port_ident(ir, *p)).collect();
            let _ = writeln!(out, "    {}({});", t.name, args.join(", "));
        }
        out.push_str("}\n");
    }

    EmittedUnit { file_name: format!("{}.cl", ir.kernel_name), source_text: out, kind: vendor.unit_kind() }
}

fn port_ident(ir: &KernelIr, p: IrPort) -> &str {
    match p {
        IrPort::Global(g) => &ir.interfaces[g].port_name,
        IrPort::Channel(c) => &ir.channels[c].name,
    }
}

fn dataflow_kernel(d: &Ocl, ir: &KernelIr, t: &TaskIr) -> String {
    let mut out = String::new();
    let globals: Vec<usize> = t.globals().collect();
    let mem = |g: usize| format!("mem{}", globals.iter().position(|&x| x == g).unwrap());
    let params: Vec<String> = globals
        .iter()
        .enumerate()
        .map(|(k, &g)| match ir.interfaces[g].direction {
            Direction::Read => format!("__global const tok_t* restrict mem{k}"),
            Direction::Write => format!("__global tok_t* restrict mem{k}"),
        })
        .collect();
    let endpoint = |p: &IrPort| match *p {
        IrPort::Global(g) => Endpoint::Mem(mem(g)),
        IrPort::Channel(c) => Endpoint::Chan(ir.channels[c].name.clone()),
    };
    let reads: Vec<Endpoint> = t.reads.iter().map(endpoint).collect();
    let writes: Vec<Endpoint> = t.writes.iter().map(endpoint).collect();
    let _ = writeln!(out, "// {} ({})", t.source_name, t.kind.keyword());
    match d.vendor {
        Vendor::Xilinx => out.push_str("__attribute__((reqd_work_group_size(1, 1, 1)))\n"),
        Vendor::Intel => {
            out.push_str("__attribute__((max_global_work_dim(0)))\n");
            if globals.is_empty() {
                out.push_str("__attribute__((autorun))\n");
            }
        }
    }
    let _ = writeln!(out, "__kernel void {}({}) {{", t.name, params.join(", "));
    out.push_str(&task_body(d, ir, t, &reads, &writes));
    out.push_str("}\n");
    out
}

fn naive_task(d: &Ocl, ir: &KernelIr, t: &TaskIr) -> String {
    let ports: Vec<&IrPort> = t.reads.iter().chain(&t.writes).collect();
    let params: Vec<String> = ports
        .iter()
        .enumerate()
        .map(|(k, _)| {
            let konst = if k < t.reads.len() { "const " } else { "" };
            format!("__global {konst}tok_t* restrict mem{k}")
        })
        .collect();
    let reads: Vec<Endpoint> = (0..t.reads.len()).map(|k| Endpoint::Mem(format!("mem{k}"))).collect();
    let writes: Vec<Endpoint> = (t.reads.len()..ports.len()).map(|k| Endpoint::Mem(format!("mem{k}"))).collect();
    let mut out = String::new();
    let _ = writeln!(out, "// {} ({})", t.source_name, t.kind.keyword());
    let _ = writeln!(out, "static void {}({}) {{", t.name, params.join(", "));
    out.push_str(&task_body(d, ir, t, &reads, &writes));
    out.push_str("}\n");
    out
}

/// Host program for an OpenCL kernel set from [`emit_ocl_kernel`]. Every
/// launched kernel gets its own in-order queue so the dataflow kernels run
/// concurrently; the binary path defaults to `<kernel>.xclbin` or
/// `<kernel>.aocx` and may be given as the first argument.
pub fn emit_ocl_host(ir: &KernelIr, vendor: Vendor, dataflow: bool) -> Result<EmittedUnit, EmitError> {
    if ir.interfaces.is_empty() {
        return Err(EmitError::NoInterface);
    }
    let (w, h) = (ir.width, ir.height);
    let bytes = format!("{w} * {h} * sizeof(int)");
    let kernels = launched(ir, vendor, dataflow);
    let mut out = String::new();
    out.push_str("#define CL_HPP_TARGET_OPENCL_VERSION 120\n#define CL_HPP_MINIMUM_OPENCL_VERSION 120\n");
    out.push_str("#include <CL/cl2.hpp>\n\n");
    out.push_str("#include <cstdlib>\n#include <fstream>\n#include <iostream>\n#include <iterator>\n#include <string>\n#include <vector>\n\n");
    out.push_str(PGM_HELPERS);
    out.push('\n');
    out.push_str("int main(int argc, char** argv) {\n");
    let _ =
        writeln!(out, "    const char* binary = argc > 1 ? argv[1] : \"{}.{}\";", ir.kernel_name, vendor.binary_ext());
    out.push_str("    std::vector<cl::Platform> platforms;\n");
    out.push_str("    cl::Platform::get(&platforms);\n");
    out.push_str("    std::vector<cl::Device> devices;\n");
    out.push_str("    platforms[0].getDevices(CL_DEVICE_TYPE_ACCELERATOR, &devices);\n");
    out.push_str("    cl::Device device = devices[0];\n");
    out.push_str("    cl::Context context(device);\n");
    out.push_str("    std::ifstream bin(binary, std::ios::binary);\n");
    out.push_str("    std::vector<unsigned char> image((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());\n");
    out.push_str("    cl::Program program(context, {device}, cl::Program::Binaries{image});\n");
    out.push_str("    program.build();\n");
    for k in 0..kernels.len() {
        let _ = writeln!(out, "    cl::CommandQueue q{k}(context, device);");
    }
    for p in &ir.interfaces {
        let _ = writeln!(out, "    cl::Buffer buffer_{}(context, CL_MEM_READ_WRITE, {bytes});", p.port_name);
    }
    if !dataflow {
        for c in &ir.channels {
            let _ = writeln!(out, "    cl::Buffer buffer_{}(context, CL_MEM_READ_WRITE, {bytes});", c.name);
        }
    }
    for p in ir.interfaces.iter().filter(|p| p.direction == Direction::Read) {
        let _ = writeln!(out, "    std::vector<int> {}_host = load_pgm(\"{}\", {w}, {h});", p.port_name, p.path);
        let _ =
            writeln!(out, "    q0.enqueueWriteBuffer(buffer_{0}, CL_TRUE, 0, {bytes}, {0}_host.data());", p.port_name);
    }
    for (k, (name, args)) in kernels.iter().enumerate() {
        let _ = writeln!(out, "    cl::Kernel kernel{k}(program, \"{name}\");");
        for (i, a) in args.iter().enumerate() {
            let _ = writeln!(out, "    kernel{k}.setArg({i}, buffer_{a});");
        }
    }
    for k in 0..kernels.len() {
        let _ = writeln!(out, "    q{k}.enqueueTask(kernel{k});");
    }
    for k in 0..kernels.len() {
        let _ = writeln!(out, "    q{k}.finish();");
    }
    for p in ir.interfaces.iter().filter(|p| p.direction == Direction::Write) {
        let _ = writeln!(out, "    std::vector<int> {}_host({w} * {h});", p.port_name);
        let _ =
            writeln!(out, "    q0.enqueueReadBuffer(buffer_{0}, CL_TRUE, 0, {bytes}, {0}_host.data());", p.port_name);
        let _ = writeln!(out, "    write_pgm(\"{}\", {}_host, {w}, {h});", p.path, p.port_name);
    }
    out.push_str("    return 0;\n}\n");
    Ok(EmittedUnit { file_name: "host.cpp".into(), source_text: out, kind: UnitKind::Host })
}
