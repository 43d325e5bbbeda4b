use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use super::{EmitError, EmittedUnit, UnitKind};
use crate::schedule::{Direction, KernelIr};

/// PGM (P5) load and store used by every generated host program. Pixels are
/// widened to `int` on load and clamped to the file's range on store.
pub(crate) const PGM_HELPERS: &str = r#"static std::vector<int> load_pgm(const char* path, int width, int height) {
    std::ifstream f(path, std::ios::binary);
    if (!f) { std::cerr << "cannot open " << path << "\n"; std::exit(1); }
    std::string magic;
    int w, h, maxval;
    f >> magic >> w >> h >> maxval;
    f.get();
    if (magic != "P5" || w != width || h != height) {
        std::cerr << path << ": expected a " << width << "x" << height << " P5 image\n";
        std::exit(1);
    }
    std::vector<int> px(static_cast<size_t>(w) * h);
    for (auto& p : px) {
        int hi = f.get();
        p = maxval > 255 ? (hi << 8) | f.get() : hi;
    }
    return px;
}

static void write_pgm(const char* path, const std::vector<int>& px, int width, int height) {
    std::ofstream f(path, std::ios::binary);
    f << "P5\n" << width << " " << height << "\n255\n";
    for (int p : px) f.put(static_cast<char>(p < 0 ? 0 : p > 255 ? 255 : p));
}
"#;

/// Host program for the Vitis flow: loads each input image, runs the kernel
/// once and writes each output image. The xclbin path defaults to
/// `<kernel>.xclbin` and may be given as the first argument.
pub fn emit_host(ir: &KernelIr) -> Result<EmittedUnit, EmitError> {
    emit_host_with_binary(ir, &format!("{}.xclbin", ir.kernel_name))
}

/// [`emit_host`] with a different default xclbin path.
pub fn emit_host_with_binary(ir: &KernelIr, binary: &str) -> Result<EmittedUnit, EmitError> {
    if ir.interfaces.is_empty() {
        return Err(EmitError::NoInterface);
    }
    let (w, h) = (ir.width, ir.height);
    let bytes = format!("{w} * {h} * sizeof(int)");
    let mut out = String::new();
    out.push_str(
        "#include <cstdlib>\n#include <fstream>\n#include <iostream>\n#include <string>\n#include <vector>\n\n",
    );
    out.push_str("#include \"xcl2.hpp\"\n\n");
    out.push_str(PGM_HELPERS);
    out.push('\n');
    out.push_str("int main(int argc, char** argv) {\n");
    let _ = writeln!(out, "    const char* binary = argc > 1 ? argv[1] : \"{binary}\";");
    out.push_str("    cl_int err;\n");
    out.push_str("    std::vector<cl::Device> devices = xcl::get_xil_devices();\n");
    out.push_str("    cl::Device device = devices[0];\n");
    out.push_str("    auto file_buf = xcl::read_binary_file(binary);\n");
    out.push_str("    cl::Program::Binaries bins{{file_buf.data(), file_buf.size()}};\n");
    out.push_str("    cl::Context context(device, nullptr, nullptr, nullptr, &err);\n");
    out.push_str("    cl::CommandQueue q(context, device, CL_QUEUE_PROFILING_ENABLE, &err);\n");
    for p in &ir.interfaces {
        let _ =
            writeln!(out, "    cl::Buffer buffer_{}(context, CL_MEM_READ_WRITE, {bytes}, nullptr, &err);", p.port_name);
    }
    for p in ir.interfaces.iter().filter(|p| p.direction == Direction::Read) {
        let _ = writeln!(out, "    std::vector<int> {}_host = load_pgm(\"{}\", {w}, {h});", p.port_name, p.path);
        let _ =
            writeln!(out, "    q.enqueueWriteBuffer(buffer_{0}, CL_TRUE, 0, {bytes}, {0}_host.data());", p.port_name);
    }
    out.push_str("    cl::Program program(context, {device}, bins, nullptr, &err);\n");
    let _ = writeln!(out, "    cl::Kernel kernel(program, \"{}\", &err);", ir.kernel_name);
    for (i, p) in ir.interfaces.iter().enumerate() {
        let _ = writeln!(out, "    kernel.setArg({i}, buffer_{});", p.port_name);
    }
    out.push_str("    q.enqueueTask(kernel);\n");
    out.push_str("    q.finish();\n");
    for p in ir.interfaces.iter().filter(|p| p.direction == Direction::Write) {
        let _ = writeln!(out, "    std::vector<int> {}_host({w} * {h});", p.port_name);
        let _ =
            writeln!(out, "    q.enqueueReadBuffer(buffer_{0}, CL_TRUE, 0, {bytes}, {0}_host.data());", p.port_name);
        let _ = writeln!(out, "    write_pgm(\"{}\", {}_host, {w}, {h});", p.path, p.port_name);
    }
    out.push_str("    return 0;\n}\n");
    Ok(EmittedUnit { file_name: "host.cpp".into(), source_text: out, kind: UnitKind::Host })
}
