//! Emitted sources against the stored golden files, plus structural checks
//! that re-parse the generated text. Set `UPDATE_GOLDEN=1` to rewrite the
//! golden files after an intended change.

mod common;

use std::collections::BTreeMap;

use common::{corpus_file, flower, golden_dir};

fn compile(args: &[&str]) -> (tempfile::TempDir, BTreeMap<String, String>) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap().to_string();
    let mut argv = vec!["compile"];
    argv.extend_from_slice(args);
    argv.extend_from_slice(&["-o", &out]);
    let r = flower(&argv);
    assert_eq!(r.status, 0, "{}", r.stderr);
    let files = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read_to_string(e.path()).unwrap())
        })
        .collect();
    (dir, files)
}

fn check_golden(name: &str, actual: &str) {
    let path = golden_dir().join(name);
    if std::env::var("UPDATE_GOLDEN").is_ok_and(|v| v == "1") {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert!(expected == actual, "{name} differs from the golden file:\n{actual}");
}

fn diamond() -> String {
    corpus_file("diamond").to_str().unwrap().to_string()
}

/// Body lines of `void hls_top(...) { ... }`.
fn top_function(src: &str) -> Vec<&str> {
    let start = src.lines().position(|l| l.starts_with("void hls_top(")).expect("no top function");
    src.lines().skip(start + 1).take_while(|l| *l != "}").collect()
}

fn pragma_counts(body: &[&str]) -> BTreeMap<&'static str, usize> {
    let kinds = [
        ("DATAFLOW", "#pragma HLS DATAFLOW"),
        ("STREAM depth 2", "#pragma HLS STREAM"),
        ("m_axi", "#pragma HLS INTERFACE m_axi"),
        ("s_axilite", "#pragma HLS INTERFACE s_axilite"),
        ("STABLE", "#pragma HLS STABLE"),
        ("ap_ctrl_chain", "#pragma HLS INTERFACE ap_ctrl_chain"),
    ];
    let mut counts = BTreeMap::new();
    for (key, prefix) in kinds {
        let n = body
            .iter()
            .filter(|l| l.starts_with(prefix) && (key != "STREAM depth 2" || l.ends_with("depth = 2")))
            .count();
        counts.insert(key, n);
    }
    counts
}

#[test]
fn diamond_matches_golden() {
    let (_d, files) = compile(&[&diamond(), "--no-burst"]);
    check_golden("diamond_hls_top.cpp", &files["hls_top.cpp"]);
    check_golden("diamond_host.cpp", &files["host.cpp"]);
    let (_d, files) = compile(&[&diamond()]);
    check_golden("diamond_burst_hls_top.cpp", &files["hls_top.cpp"]);
}

#[test]
fn diamond_dot_matches_golden() {
    let r = flower(&["graph", &diamond()]);
    assert_eq!(r.status, 0);
    check_golden("diamond.dot", &r.stdout);
}

#[test]
fn lucas_kanade_link_config_matches_golden() {
    let (_d, files) = compile(&[corpus_file("lucas_kanade").to_str().unwrap(), "--gmem-opt"]);
    check_golden("lucas_kanade_link.cfg", &files["link.cfg"]);
}

#[test]
fn diamond_pragmas_and_calls() {
    let golden = std::fs::read_to_string(golden_dir().join("diamond_hls_top.cpp")).unwrap();
    let body = top_function(&golden);
    let counts = pragma_counts(&body);
    let expected: BTreeMap<&str, usize> =
        [("DATAFLOW", 1), ("STREAM depth 2", 4), ("m_axi", 2), ("s_axilite", 2), ("STABLE", 2), ("ap_ctrl_chain", 1)]
            .into_iter()
            .collect();
    assert_eq!(counts, expected);
    assert!(body.contains(&"#pragma HLS top name = hls_top"));
    let calls: Vec<&str> = body.iter().filter(|l| l.starts_with("    task")).map(|l| l.trim()).collect();
    assert_eq!(
        calls,
        [
            "task1(input_data, chan1, chan2);",
            "task2(chan1, chan3);",
            "task3(chan2, chan4);",
            "task4(output_data, chan3, chan4);"
        ]
    );
    assert!(golden.contains("void hls_top(int4 input_data[262144], int4 output_data[262144]) {"));
}

/// Splits `chanN_slot`, `chanN` and friends into identifier tokens.
fn identifiers(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).filter(|s| !s.is_empty())
}

#[test]
fn every_channel_appears_on_five_lines() {
    for name in ["diamond", "sobel", "harris", "lucas_kanade", "unsharp_mask"] {
        let (_d, files) = compile(&[corpus_file(name).to_str().unwrap()]);
        let body = top_function(&files["hls_top.cpp"]);
        let channels: Vec<String> = body
            .iter()
            .filter(|l| l.starts_with("#pragma HLS STREAM"))
            .map(|l| l.split_whitespace().nth(5).unwrap().to_string())
            .collect();
        assert!(!channels.is_empty());
        for c in &channels {
            let slot = format!("{c}_slot");
            let lines = body.iter().filter(|l| identifiers(l).any(|id| id == c || id == slot)).count();
            assert_eq!(lines, 5, "{name}: {c}");
        }
    }
}

/// Re-parses the generated unit: every channel must be written by a task
/// called before the task that reads it.
#[test]
fn calls_are_topologically_ordered() {
    for (name, _) in flower_core::corpus::ALL {
        let (_d, files) = compile(&[corpus_file(name).to_str().unwrap()]);
        let src = &files["hls_top.cpp"];
        let body = top_function(src);
        let order: Vec<&str> =
            body.iter().filter(|l| l.starts_with("    task")).map(|l| l.trim().split('(').next().unwrap()).collect();
        let position = |t: &str| order.iter().position(|x| *x == t).unwrap();

        // Which function writes and which reads each stream.
        let mut writer: BTreeMap<String, String> = BTreeMap::new();
        let mut reader: BTreeMap<String, String> = BTreeMap::new();
        let mut current = String::new();
        for line in src.lines() {
            if let Some(rest) = line.strip_prefix("void task") {
                if line.ends_with('{') {
                    current = format!("task{}", rest.split('(').next().unwrap());
                }
            }
            if let Some((chan, _)) = line.trim().split_once("->write(") {
                writer.insert(chan.to_string(), current.clone());
            }
            if let Some((lhs, _)) = line.split_once("->read()") {
                reader.insert(lhs.rsplit(' ').next().unwrap().to_string(), current.clone());
            }
        }
        assert_eq!(writer.len(), reader.len(), "{name}");
        for (chan, w) in &writer {
            let r = &reader[chan];
            assert!(position(w) < position(r), "{name}: {chan} written by {w} after its reader {r}");
        }
        let distinct: std::collections::BTreeSet<&str> = order.iter().copied().collect();
        assert_eq!(distinct.len(), order.len(), "{name}: a task is called twice");
    }
}

#[test]
fn host_structure() {
    let host = std::fs::read_to_string(golden_dir().join("diamond_host.cpp")).unwrap();
    assert_eq!(host.matches("enqueueTask(").count(), 1);
    assert!(host.contains("cl::Kernel kernel(program, \"hls_top\", &err);"));
    // Steps appear in the documented order.
    let steps = [
        "xcl::get_xil_devices()",
        "xcl::read_binary_file(",
        "cl::Context context(",
        "cl::CommandQueue q(",
        "cl::Buffer buffer_input_data(",
        "load_pgm(\"input.pgm\"",
        "enqueueWriteBuffer(",
        "setArg(0,",
        "enqueueTask(",
        "q.finish()",
        "enqueueReadBuffer(",
        "write_pgm(\"output.pgm\"",
    ];
    let positions: Vec<usize> = steps.iter().map(|s| host.find(s).unwrap_or_else(|| panic!("missing {s}"))).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{positions:?}");

    for (name, ports) in [("diamond", 2), ("lucas_kanade", 4), ("independent5", 10)] {
        let (_d, files) = compile(&[corpus_file(name).to_str().unwrap()]);
        let host = &files["host.cpp"];
        let args: Vec<usize> = host
            .lines()
            .filter_map(|l| l.trim().strip_prefix("kernel.setArg("))
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(args, (0..ports).collect::<Vec<_>>(), "{name}");
        let buffers = host.matches("cl::Buffer buffer_").count();
        assert_eq!(buffers, ports);
        assert_eq!(host.matches("CL_MEM_READ_WRITE, 1024 * 1024 * sizeof(int)").count(), ports);
    }
}

#[test]
fn vector_length_one_has_no_vector_type() {
    let (_d, files) = compile(&[&diamond(), "--vec", "1"]);
    let src = &files["hls_top.cpp"];
    assert!(!src.contains("typedef struct"));
    assert!(src.contains("typedef hls::stream<int> int_chan;"));
    assert!(src.contains("void hls_top(int input_data[1048576], int output_data[1048576]) {"));
}

#[test]
fn gmem_opt_gives_distinct_bundles() {
    for (name, ports) in [("lucas_kanade", 4), ("independent5", 10), ("diamond", 2)] {
        let (_d, files) = compile(&[corpus_file(name).to_str().unwrap(), "--gmem-opt", "--banks", "16"]);
        let src = &files["hls_top.cpp"];
        let bundles: std::collections::BTreeSet<&str> =
            src.lines().filter_map(|l| l.split("bundle = ").nth(1)).map(|r| r.split(' ').next().unwrap()).collect();
        assert_eq!(bundles.len(), ports, "{name}");
    }
}

#[test]
fn output_is_deterministic() {
    for target in ["vitis-hls", "xilinx-ocl", "intel-ocl"] {
        for name in ["diamond", "harris", "lucas_kanade"] {
            let f = corpus_file(name);
            let args = [f.to_str().unwrap(), "--target", target, "--gmem-opt"];
            let (_a, first) = compile(&args);
            let (_b, second) = compile(&args);
            assert_eq!(first, second, "{target} {name}");
        }
    }
}

#[test]
fn opencl_variants_have_parallel_structure() {
    let f = diamond();
    let (_a, intel) = compile(&[&f, "--target", "intel-ocl", "--no-burst"]);
    let (_b, xilinx) = compile(&[&f, "--target", "xilinx-ocl", "--no-burst"]);
    let intel = &intel["hls_top.cl"];
    let xilinx = &xilinx["hls_top.cl"];
    assert_eq!(intel.matches("__kernel void").count(), 4);
    assert_eq!(xilinx.matches("__kernel void").count(), 4);
    assert_eq!(intel.lines().filter(|l| l.starts_with("channel tok_t")).count(), 4);
    let pipes: Vec<&str> = xilinx.lines().filter(|l| l.starts_with("pipe tok_t")).collect();
    assert_eq!(pipes.len(), 4);
    assert!(pipes.iter().all(|l| l.ends_with("__attribute__((xcl_reqd_pipe_depth(16)));")));
    assert!(intel.contains("typedef int4 tok_t;") && xilinx.contains("typedef int4 tok_t;"));
    assert!(intel.starts_with("#pragma OPENCL EXTENSION cl_intel_channels : enable"));
}
