use alloc::string::String;
use alloc::vec::Vec;

use super::*;
use crate::frontend::{compile_source, Program};
use crate::graph::extract_graph;
use crate::schedule::build_kernel_ir;
use crate::transform::burst_split;

fn program(name: &str) -> Program {
    compile_source(crate::corpus::get(name).unwrap()).unwrap()
}

fn ir(p: &Program) -> KernelIr {
    build_kernel_ir(p, &extract_graph(p)).unwrap()
}

/// Lines of the top-level function body, without the header and brace.
fn top_body(src: &str) -> Vec<&str> {
    let start = src.lines().position(|l| l.starts_with("void hls_top(")).unwrap();
    src.lines().skip(start + 1).take_while(|l| *l != "}").collect()
}

#[test]
fn diamond_top_function() {
    let unit = emit_top_kernel(&ir(&program("diamond")));
    assert_eq!(unit.file_name, "hls_top.cpp");
    assert_eq!(unit.kind, UnitKind::HlsCpp);
    let src = &unit.source_text;
    assert!(src.contains("typedef struct { int e[4]; } int4;\ntypedef hls::stream<int4> int4_chan;\n"));
    assert!(src.contains("void task1(int4[262144], int4_chan*, int4_chan*);\n"));
    assert!(src.contains("void task4(int4[262144], int4_chan*, int4_chan*);\n"));
    assert!(src.contains("void hls_top(int4 input_data[262144], int4 output_data[262144]) {\n"));
    let body = top_body(src);
    let calls: Vec<&str> = body.iter().filter(|l| l.starts_with("    task")).copied().collect();
    assert_eq!(
        calls,
        [
            "    task1(input_data, chan1, chan2);",
            "    task2(chan1, chan3);",
            "    task3(chan2, chan4);",
            "    task4(output_data, chan3, chan4);",
        ]
    );
    let decls = body.iter().filter(|l| l.starts_with("    int4_chan")).count();
    assert_eq!(decls, 5);
    let depths = body.iter().filter(|l| l.starts_with("#pragma HLS STREAM") && l.ends_with("depth = 2")).count();
    assert_eq!(depths, 4);
    let pragmas: Vec<&str> = body.iter().filter(|l| l.starts_with("#pragma")).copied().collect();
    assert_eq!(pragmas[0], "#pragma HLS INTERFACE m_axi port = input_data bundle = gmem0 offset = slave");
    assert!(pragmas.contains(&"#pragma HLS INTERFACE ap_ctrl_chain port = return"));
    assert!(pragmas.contains(&"#pragma HLS DATAFLOW"));
}

#[test]
fn every_task_is_defined_once() {
    for (name, src) in crate::corpus::ALL {
        let k = ir(&burst_split(&compile_source(src).unwrap()));
        let text = emit_top_kernel(&k).source_text;
        for t in &k.tasks {
            let def = alloc::format!("void {}(", t.name);
            // Prototype and definition.
            assert_eq!(text.matches(&def).count(), 2, "{name}: {}", t.name);
        }
    }
}

#[test]
fn helpers_follow_use() {
    let square = emit_top_kernel(&ir(&program("square"))).source_text;
    assert!(square.contains("flw_div"));
    assert!(!square.contains("flw_clamp"));
    let diamond = emit_top_kernel(&ir(&program("diamond"))).source_text;
    assert!(!diamond.contains("flw_"));
    let gaussian = emit_top_kernel(&ir(&program("gaussian"))).source_text;
    assert!(gaussian.contains("static inline int flw_clamp("));
    assert!(gaussian.contains("flw_div(acc, 256)"));
}

#[test]
fn expression_rendering() {
    struct Plain;
    impl Dialect for Plain {
        fn tok(&self) -> &str {
            "int"
        }
        fn lanes(&self) -> u32 {
            1
        }
        fn lane(&self, var: &str, _: u32) -> String {
            var.into()
        }
        fn read(&self, _: &str, _: &Endpoint, _: &str) -> String {
            String::new()
        }
        fn write(&self, _: &Endpoint, _: &str, _: &str) -> String {
            String::new()
        }
    }
    let p = compile_source(
        r#"image a(4, 4) = input("a") image b(4, 4) = output("b")
           task f point(clamp(-pix * 3 / (pix - -2147483648), -1, 2)) reads a writes b"#,
    )
    .unwrap();
    let TaskKind::Point(e) = &p.tasks[0].kind else { panic!() };
    assert_eq!(render_expr(e, &Plain, 0), "flw_clamp(flw_div(((-in0) * 3), (in0 - (-2147483647 - 1))), (-1), 2)");
}

#[test]
fn ring_buffer_rows() {
    assert_eq!(ring_rows(1, 1024, 1), 4);
    assert_eq!(ring_rows(2, 1024, 4), 6);
    // Narrow images: the lookahead spans more than one extra row.
    assert_eq!(ring_rows(2, 4, 4), 5 + 2);
}

#[test]
fn host_program() {
    let k = ir(&program("lucas_kanade"));
    let host = emit_host(&k).unwrap();
    assert_eq!(host.file_name, "host.cpp");
    let src = &host.source_text;
    assert_eq!(src.matches("enqueueTask(").count(), 1);
    for (i, p) in k.interfaces.iter().enumerate() {
        assert!(src.contains(&alloc::format!("kernel.setArg({i}, buffer_{});", p.port_name)));
    }
    assert_eq!(src.matches("enqueueWriteBuffer(").count(), 2);
    assert_eq!(src.matches("enqueueReadBuffer(").count(), 2);
    assert!(src.contains("\"hls_top.xclbin\""));
    assert!(src.contains("cl::Kernel kernel(program, \"hls_top\", &err);"));
}

#[test]
fn host_needs_a_port() {
    let k = crate::schedule::KernelIr {
        kernel_name: "hls_top".into(),
        tasks: Vec::new(),
        channels: Vec::new(),
        interfaces: Vec::new(),
        vector_length: 1,
        width: 4,
        height: 4,
    };
    assert_eq!(emit_host(&k), Err(EmitError::NoInterface));
    assert_eq!(emit_ocl_host(&k, Vendor::Intel, true), Err(EmitError::NoInterface));
}

#[test]
fn vendors() {
    assert_eq!("Xilinx".parse::<Vendor>(), Ok(Vendor::Xilinx));
    assert_eq!("intel".parse::<Vendor>(), Ok(Vendor::Intel));
    assert_eq!("amd".parse::<Vendor>(), Err(EmitError::UnsupportedVendor("amd".into())));
    assert_eq!(ocl::xilinx_pipe_depth(2), 16);
    assert_eq!(ocl::xilinx_pipe_depth(17), 32);
}

#[test]
fn intel_channels_and_autorun() {
    let k = ir(&burst_split(&program("diamond")));
    let unit = emit_ocl_kernel(&k, Vendor::Intel, true);
    assert_eq!(unit.kind, UnitKind::OclIntel);
    let src = &unit.source_text;
    assert!(src.starts_with("#pragma OPENCL EXTENSION cl_intel_channels : enable\n"));
    assert!(src.contains("typedef int4 tok_t;"));
    // Only the burst read and write tasks touch memory.
    let with_globals = k.tasks.iter().filter(|t| t.globals().next().is_some()).count();
    assert_eq!(with_globals, 2);
    assert_eq!(src.matches("__attribute__((autorun))").count(), k.tasks.len() - 2);
    assert_eq!(src.matches("__kernel void").count(), k.tasks.len());
    assert!(src.contains("read_channel_intel(") && src.contains("write_channel_intel("));
    let host = emit_ocl_host(&k, Vendor::Intel, true).unwrap().source_text;
    assert_eq!(host.matches("enqueueTask(").count(), 2);
    assert!(host.contains("\"hls_top.aocx\""));
}

#[test]
fn xilinx_pipes() {
    let k = ir(&program("gaussian"));
    let src = emit_ocl_kernel(&k, Vendor::Xilinx, true).source_text;
    assert_eq!(src.matches("pipe tok_t").count(), k.channels.len());
    assert!(src.contains("read_pipe_block(") || k.channels.is_empty());
    let host = emit_ocl_host(&k, Vendor::Xilinx, true).unwrap().source_text;
    assert_eq!(host.matches("enqueueTask(").count(), k.tasks.len());
    assert_eq!(host.matches("cl::CommandQueue q").count(), k.tasks.len());
}

#[test]
fn naive_opencl_is_one_kernel() {
    let k = ir(&burst_split(&program("sobel")));
    let src = emit_ocl_kernel(&k, Vendor::Xilinx, false).source_text;
    assert_eq!(src.matches("__kernel void").count(), 1);
    assert!(!src.contains("pipe "));
    let host = emit_ocl_host(&k, Vendor::Xilinx, false).unwrap().source_text;
    assert_eq!(host.matches("enqueueTask(").count(), 1);
    assert_eq!(host.matches("kernel0.setArg(").count(), k.interfaces.len() + k.channels.len());
}
