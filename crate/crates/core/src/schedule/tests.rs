use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::*;
use crate::frontend::{compile_source, Program};
use crate::graph::{extract_graph, GraphError};
use crate::transform::{burst_split, vectorize};

fn program(name: &str) -> Program {
    compile_source(crate::corpus::get(name).unwrap()).unwrap()
}

fn ir(p: &Program) -> KernelIr {
    build_kernel_ir(p, &extract_graph(p)).unwrap()
}

fn chain(kind: &str, w: u32, h: u32) -> KernelIr {
    let src = alloc::format!(
        r#"image a({w}, {h}) = input("a") image b({w}, {h}) = output("b")
           task f {kind} reads a writes b"#
    );
    ir(&burst_split(&compile_source(&src).unwrap()))
}

const LOCAL5: &str = "local(5, [1,1,1,1,1, 1,1,1,1,1, 1,1,1,1,1, 1,1,1,1,1, 1,1,1,1,1] / 25)";
const LOCAL3: &str = "local(3, [0,1,0, 1,-4,1, 0,1,0])";

#[test]
fn diamond_ir() {
    let d = ir(&program("diamond"));
    let tasks: Vec<_> = d.tasks.iter().map(|t| (t.name.as_str(), t.source_name.as_str())).collect();
    assert_eq!(tasks, [("task1", "split"), ("task2", "fun1"), ("task3", "fun2"), ("task4", "fun3")]);
    let chans: Vec<_> = d.channels.iter().map(|c| (c.name.as_str(), c.source_name.as_str(), c.depth)).collect();
    assert_eq!(chans, [("chan1", "chan1", 2), ("chan2", "chan2", 2), ("chan3", "chan3", 2), ("chan4", "chan4", 2)]);
    let ports: Vec<_> =
        d.interfaces.iter().map(|i| (i.port_name.as_str(), i.bundle.as_str(), i.bus_width_bits)).collect();
    assert_eq!(ports, [("input_data", "gmem0", 128), ("output_data", "gmem0", 128)]);
    assert_eq!(d.tasks[0].globals().collect::<Vec<_>>(), [0]);
    assert_eq!(d.tasks[3].globals().collect::<Vec<_>>(), [1]);
    assert_eq!(d.tokens(), 262144);
}

#[test]
fn single_task_after_burst_split_has_three_tasks() {
    let c = chain("point(pix)", 16, 16);
    let kinds: Vec<_> = c.tasks.iter().map(|t| t.kind.keyword()).collect();
    assert_eq!(kinds, ["read", "point", "write"]);
}

#[test]
fn empty_program_is_rejected() {
    let p = compile_source("").unwrap();
    assert_eq!(build_kernel_ir(&p, &extract_graph(&p)), Err(IrError::Invalid(alloc::vec![GraphError::NoTasks])));
}

#[test]
fn several_ports_take_image_names() {
    let lk = ir(&burst_split(&program("lucas_kanade")));
    let names: Vec<_> = lk.interfaces.iter().map(|i| i.port_name.as_str()).collect();
    assert_eq!(names, ["frame1", "frame2", "flow_y", "flow_x"]);
}

#[test]
fn port_names_avoid_generated_identifiers() {
    let src = r#"image chan1(4, 4) = input("a") image int(4, 4) = input("b") image o(4, 4) = output("c")
        task f point2(pix1 + pix2) reads chan1, int writes o"#;
    let p = compile_source(src).unwrap();
    let names: Vec<_> = ir(&p).interfaces.iter().map(|i| i.port_name.clone()).collect();
    assert_eq!(names, ["chan1_data", "int_data", "output_data"]);
}

#[test]
fn task_latency_model() {
    let at = |kind: &str, v: u32| {
        let mut p = compile_source(&alloc::format!(
            r#"image a(1024, 1024) = input("a") image b(1024, 1024) = output("b") task f {kind} reads a writes b"#
        ))
        .unwrap();
        p = vectorize(&p, v).unwrap();
        let k = ir(&p);
        estimate_task_latency(&k.tasks[0], 1024, 1024, v)
    };
    assert_eq!(at(LOCAL5, 1), (1050627, 2051));
    assert_eq!(at("point(pix)", 1), (1048577, 1));
    assert_eq!(at(LOCAL3, 4), (262402, 258));
}

#[test]
fn five_independent_tasks_with_overrides() {
    let k = ir(&program("independent5"));
    assert!(k.channels.is_empty());
    let overrides: Vec<(String, u64)> = [1048576, 1050632, 1050632, 1050632, 1048577]
        .iter()
        .enumerate()
        .map(|(i, l)| (alloc::format!("t{}", i + 1), *l))
        .collect();
    let r = estimate_kernel_latency(&k, &overrides).unwrap();
    assert_eq!(r.kernel_sequential, 5249049);
    assert_eq!(r.kernel_dataflow, 1050632);
    assert_eq!(estimate_kernel_latency(&k, &[("nope".to_string(), 1)]), Err(EstimateError::UnknownTask("nope".into())));
}

#[test]
fn single_task_modes_agree() {
    let p =
        compile_source(r#"image a(8, 8) = input("a") image b(8, 8) = output("b") task f point(pix) reads a writes b"#)
            .unwrap();
    let r = estimate_kernel_latency(&ir(&p), &[("f".into(), 100)]).unwrap();
    assert_eq!((r.kernel_sequential, r.kernel_dataflow), (100, 100));
}

#[test]
fn chain_is_tokens_plus_fills() {
    let r = estimate_kernel_latency(&chain(LOCAL5, 1024, 1024), &[]).unwrap();
    assert_eq!(r.kernel_dataflow, 1048576 + 1 + 2051 + 1);
    assert_eq!(r.kernel_sequential, 3 * 1048576 + 1 + 2051 + 1);
}

#[test]
fn dataflow_uses_longest_fill_path() {
    // sobel: read, split, two stencils in parallel, join, write.
    let k = ir(&burst_split(&program("sobel")));
    let r = estimate_kernel_latency(&k, &[]).unwrap();
    assert_eq!(r.kernel_dataflow, 1048576 + 1 + 1 + 1026 + 1 + 1);
    assert!(r.kernel_dataflow <= r.kernel_sequential);
}

#[test]
fn balanced_paths_keep_default_depth() {
    let k = ir(&burst_split(&program("diamond")));
    assert!(k.channels.iter().all(|c| c.depth == 2), "{:?}", k.channels);
}

#[test]
fn unbalanced_paths_get_deeper_fifos() {
    let p = burst_split(&program("unsharp_mask").with_dimensions(16, 16));
    let k = ir(&p);
    let depth = |src: &str| k.channels.iter().find(|c| c.source_name == src).unwrap().depth;
    // The blur starts one cycle after the fork and looks ahead one row plus
    // one pixel (17 tokens); the bypass to the diff task holds all of it.
    assert_eq!(depth("to_detail"), 17 + 3);
    assert_eq!(depth("blurred"), 2);
    assert_eq!(depth("to_sharp"), 17 + 4);
}

#[test]
fn explicit_depth_is_kept() {
    let src = r#"channel a depth 3 channel b channel c channel d
        image i(16, 16) = input("i") image o(16, 16) = output("o")
        task s split(2) reads i writes a, b
        task blur local(3, [1,1,1,1,1,1,1,1,1] / 9) reads a writes c
        task pass point(pix) reads b writes d
        task j point2(pix1 - pix2) reads c, d writes o"#;
    let k = ir(&compile_source(src).unwrap());
    let depth = |src: &str| k.channels.iter().find(|c| c.source_name == src).unwrap().depth;
    assert_eq!(depth("a"), 3);
    assert_eq!(depth("d"), 2 + 17);
}

#[test]
fn min_depth_from_program_default() {
    let mut p = program("diamond");
    p.default_fifo_depth = 8;
    assert!(ir(&p).channels.iter().all(|c| c.depth == 8));
}

#[test]
fn report_formats() {
    let k = ir(&program("diamond").with_dimensions(8, 8));
    let r = estimate_kernel_latency(&k, &[]).unwrap();
    assert_eq!(
        r.to_kv(ReportMode::Both),
        "task=split L=17 d=1\ntask=fun1 L=17 d=1\ntask=fun2 L=17 d=1\ntask=fun3 L=17 d=1\nsequential=68\ndataflow=19\n"
    );
    assert!(r.to_kv(ReportMode::Dataflow).ends_with("L=17 d=1\ndataflow=19\n"));
    let table = r.to_table(ReportMode::Both);
    assert!(table.contains("kernel (dataflow)") && table.contains("speedup"), "{table}");
}
