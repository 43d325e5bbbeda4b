#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use flower_core::frontend::{compile_source, Program};
use flower_core::sim::{ImageBuf, Images};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus")
}

pub fn corpus_file(name: &str) -> PathBuf {
    corpus_dir().join(format!("{name}.flo"))
}

pub fn program(name: &str) -> Program {
    compile_source(flower_core::corpus::get(name).unwrap()).unwrap()
}

pub fn support_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("support")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub struct Output {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line in-process.
pub fn flower(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("flower").chain(args.iter().copied());
    let status = flower::cli::run(argv, &mut out, &mut err);
    Output { status, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

pub fn random_image(rng: &mut ChaCha8Rng, w: u32, h: u32) -> ImageBuf {
    ImageBuf::new(w, h, (0..w * h).map(|_| rng.gen_range(0..256)).collect())
}

pub fn random_inputs(p: &Program, seed: u64) -> Images {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    p.host_inputs().map(|(_, img)| (img.name.clone(), random_image(&mut rng, p.width, p.height))).collect()
}

pub fn gxx() -> Option<&'static str> {
    ["g++", "c++", "clang++"]
        .into_iter()
        .find(|cc| Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()))
}

/// Compiles `hls_top.cpp` from `dir` with a driver that feeds `inputs` (one
/// per read port, in port order) through the top function and returns the
/// output ports' pixels in port order.
pub fn run_emitted_hls(
    dir: &Path,
    ports: &[(String, bool)],
    pixels: usize,
    lanes: u32,
    inputs: &[&ImageBuf],
) -> Result<Vec<Vec<i32>>, String> {
    let cc = gxx().ok_or("no C++ compiler found")?;
    let tok = if lanes == 1 { "int".to_string() } else { format!("int{lanes}") };
    let tokens = pixels / lanes as usize;
    let mut drv = String::from("#include <cstdio>\n#include <cstring>\n#include \"hls_top.cpp\"\n\n");
    for (name, _) in ports {
        drv += &format!("static {tok} port_{name}[{tokens}];\n");
    }
    drv += "\nint main() {\n    static int px[";
    drv += &format!("{pixels}];\n");
    for (name, _) in ports.iter().filter(|(_, i)| *i) {
        drv += &format!(
            "    for (int i = 0; i < {pixels}; i++) if (std::scanf(\"%d\", &px[i]) != 1) return 3;\n    std::memcpy(port_{name}, px, sizeof px);\n"
        );
    }
    let args: Vec<String> = ports.iter().map(|(n, _)| format!("port_{n}")).collect();
    drv += &format!("    hls_top({});\n", args.join(", "));
    for (name, _) in ports.iter().filter(|(_, i)| !*i) {
        drv += &format!(
            "    std::memcpy(px, port_{name}, sizeof px);\n    for (int i = 0; i < {pixels}; i++) std::printf(\"%d \", px[i]);\n    std::printf(\"\\n\");\n"
        );
    }
    drv += "    return 0;\n}\n";
    std::fs::write(dir.join("driver.cpp"), drv).map_err(|e| e.to_string())?;
    let exe = dir.join("driver");
    let build = Command::new(cc)
        .args(["-std=c++17", "-O1", "-fwrapv", "-Wno-unknown-pragmas", "-I"])
        .arg(support_dir())
        .arg("-o")
        .arg(&exe)
        .arg(dir.join("driver.cpp"))
        .output()
        .map_err(|e| e.to_string())?;
    if !build.status.success() {
        return Err(format!("compilation failed:\n{}", String::from_utf8_lossy(&build.stderr)));
    }
    let stdin: String = inputs.iter().flat_map(|img| img.data.iter().map(|p| format!("{p} "))).collect();
    let mut child = Command::new(&exe)
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    use std::io::Write;
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).map_err(|e| e.to_string())?;
    let out = child.wait_with_output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("driver exited with {}", out.status));
    }
    Ok(String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect())
        .collect())
}

/// Emits `program` as HLS C++, runs it through a host C++ compiler on random
/// inputs and compares every output with the reference interpreter.
pub fn emitted_matches_reference(program: &Program, seed: u64) -> Result<(), String> {
    use flower_core::graph::extract_graph;
    use flower_core::schedule::{build_kernel_ir, Direction};

    let ir = build_kernel_ir(program, &extract_graph(program)).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let unit = flower_core::emit::emit_top_kernel(&ir);
    std::fs::write(dir.path().join(&unit.file_name), &unit.source_text).map_err(|e| e.to_string())?;
    let inputs = random_inputs(program, seed);
    let ports: Vec<(String, bool)> =
        ir.interfaces.iter().map(|d| (d.port_name.clone(), d.direction == Direction::Read)).collect();
    let feeds: Vec<&ImageBuf> =
        ir.interfaces.iter().filter(|d| d.direction == Direction::Read).map(|d| &inputs[&d.image_name]).collect();
    let outs = run_emitted_hls(dir.path(), &ports, program.pixels(), ir.vector_length, &feeds)?;
    let reference = flower_core::sim::run_reference(program, &inputs).map_err(|e| e.to_string())?;
    let writes = ir.interfaces.iter().filter(|d| d.direction == Direction::Write);
    for (d, got) in writes.zip(&outs) {
        let want = &reference[&d.image_name].data;
        if got != want {
            let i = got.iter().zip(want).position(|(a, b)| a != b).unwrap_or(0);
            return Err(format!(
                "`{}` differs at pixel {i}: emitted code gives {:?}, reference {:?}",
                d.image_name,
                got.get(i),
                want.get(i)
            ));
        }
    }
    Ok(())
}
