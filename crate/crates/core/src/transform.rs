//! Program and IR rewrites: vectorization, burst read/write splitting,
//! memory bundles and memory banks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::frontend::{ChannelDecl, ChannelId, Port, Program, TaskDecl, TaskKind};
use crate::schedule::KernelIr;
use crate::Span;

/// Widest memory bus in bits; bounds the vector length at 16 lanes.
pub const MAX_BUS_WIDTH: u32 = 512;
pub const MAX_VECTOR_LENGTH: u32 = MAX_BUS_WIDTH / 32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("vector length {v} does not divide the image width {width}")]
    VectorDoesNotDivideWidth { v: u32, width: u32 },
    #[error("vector length {v} exceeds the {MAX_BUS_WIDTH}-bit bus (at most {v_max} lanes)")]
    VectorExceedsBusWidth { v: u32, v_max: u32 },
    #[error("vector length {v} is not a power of two")]
    VectorNotPowerOfTwo { v: u32 },
}

/// Sets the vector length: every channel token then carries `v` adjacent
/// pixels. The bus width `32·v` must be a legal AXI width, so `v` is a power
/// of two no larger than 16.
pub fn vectorize(program: &Program, v: u32) -> Result<Program, TransformError> {
    if v == 0 || (program.width != 0 && !program.width.is_multiple_of(v)) {
        return Err(TransformError::VectorDoesNotDivideWidth { v, width: program.width });
    }
    if v > MAX_VECTOR_LENGTH {
        return Err(TransformError::VectorExceedsBusWidth { v, v_max: MAX_VECTOR_LENGTH });
    }
    if !v.is_power_of_two() {
        return Err(TransformError::VectorNotPowerOfTwo { v });
    }
    let mut p = program.clone();
    p.vector_length = v;
    for c in &mut p.channels {
        c.elem_width = v;
    }
    Ok(p)
}

/// Moves every global-memory access into a dedicated burst task: `read_<img>`
/// streams an input image into one channel per consuming port and sits just
/// before its first consumer; `write_<img>` drains a channel into an output
/// image and sits just after its producer. Programs already in this form are
/// returned unchanged.
pub fn burst_split(program: &Program) -> Program {
    let mut p = program.clone();

    let inputs: Vec<_> = p.host_inputs().map(|(id, _)| id).collect();
    for img in inputs {
        let readers: Vec<usize> = (0..p.tasks.len())
            .filter(|&t| !p.tasks[t].kind.is_burst() && p.tasks[t].reads.contains(&Port::Image(img)))
            .collect();
        let Some(&first) = readers.first() else { continue };
        let base = format!("{}_stream", p.image(img).name);
        let mut outs = Vec::new();
        for &t in &readers {
            for k in 0..p.tasks[t].reads.len() {
                if p.tasks[t].reads[k] == Port::Image(img) {
                    let c = add_channel(&mut p, &base);
                    p.tasks[t].reads[k] = Port::Channel(c);
                    outs.push(Port::Channel(c));
                }
            }
        }
        let name = p.fresh_name(&format!("read_{}", p.image(img).name));
        p.tasks.insert(
            first,
            TaskDecl {
                name,
                kind: TaskKind::Read,
                reads: alloc::vec![Port::Image(img)],
                writes: outs,
                span: Span::NONE,
            },
        );
    }

    let outputs: Vec<_> = p.host_outputs().map(|(id, _)| id).collect();
    for img in outputs {
        let mut t = 0;
        while t < p.tasks.len() {
            let task = &p.tasks[t];
            if task.kind.is_burst() || !task.writes.contains(&Port::Image(img)) {
                t += 1;
                continue;
            }
            let base = format!("{}_stream", p.image(img).name);
            let c = add_channel(&mut p, &base);
            for w in &mut p.tasks[t].writes {
                if *w == Port::Image(img) {
                    *w = Port::Channel(c);
                }
            }
            let name = p.fresh_name(&format!("write_{}", p.image(img).name));
            p.tasks.insert(
                t + 1,
                TaskDecl {
                    name,
                    kind: TaskKind::Write,
                    reads: alloc::vec![Port::Channel(c)],
                    writes: alloc::vec![Port::Image(img)],
                    span: Span::NONE,
                },
            );
            t += 2;
        }
    }
    p
}

fn add_channel(p: &mut Program, base: &str) -> ChannelId {
    let name = p.fresh_name(base);
    p.channels.push(ChannelDecl { name, elem_width: p.vector_length, depth: None, span: Span::NONE });
    ChannelId(p.channels.len() - 1)
}

/// Without `gmem_opt` all ports share the AXI bundle `gmem0`; with it, port
/// `i` gets its own bundle `gmem{i}`.
pub fn assign_bundles(ir: &mut KernelIr, gmem_opt: bool) {
    for (i, d) in ir.interfaces.iter_mut().enumerate() {
        d.bundle = if gmem_opt { format!("gmem{i}") } else { "gmem0".into() };
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkEntry {
    pub kernel_instance: String,
    pub port_name: String,
    pub bank: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BankOverflowWarning {
    pub ports: usize,
    pub banks: u32,
}

impl core::fmt::Display for BankOverflowWarning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{} memory ports share {} banks; assignment wraps around", self.ports, self.banks)
    }
}

/// Link-time memory connectivity for `v++`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkConfig {
    pub entries: Vec<LinkEntry>,
    pub overflow: Option<BankOverflowWarning>,
}

impl LinkConfig {
    pub fn to_text(&self) -> String {
        let mut out = String::from("[connectivity]\n");
        for e in &self.entries {
            let _ = writeln!(out, "sp={}.{}:DDR[{}]", e.kernel_instance, e.port_name, e.bank);
        }
        out
    }
}

/// Round-robin bank assignment in port order. Also records the bank on each
/// interface of `ir`.
///
/// Panics if `bank_count` is zero.
pub fn assign_banks(ir: &mut KernelIr, bank_count: u32) -> LinkConfig {
    assert!(bank_count > 0, "at least one memory bank is required");
    let instance = format!("{}_1", ir.kernel_name);
    let mut entries = Vec::with_capacity(ir.interfaces.len());
    for (i, d) in ir.interfaces.iter_mut().enumerate() {
        let bank = (i as u64 % u64::from(bank_count)) as u32;
        d.bank = Some(bank);
        entries.push(LinkEntry { kernel_instance: instance.clone(), port_name: d.port_name.clone(), bank });
    }
    let overflow = (ir.interfaces.len() > bank_count as usize)
        .then_some(BankOverflowWarning { ports: ir.interfaces.len(), banks: bank_count });
    LinkConfig { entries, overflow }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::compile_source;
    use crate::graph::{extract_graph, validate};
    use crate::schedule::build_kernel_ir;

    fn program(name: &str) -> Program {
        compile_source(crate::corpus::get(name).unwrap()).unwrap()
    }

    fn ir(p: &Program) -> KernelIr {
        build_kernel_ir(p, &extract_graph(p)).unwrap()
    }

    const SINGLE: &str = r#"image in_img(8, 8) = input("in.pgm")
        image out_img(8, 8) = output("out.pgm")
        task f point(pix * 2) reads in_img writes out_img"#;

    #[test]
    fn vectorize_sets_lanes() {
        let p = program("diamond");
        let v = vectorize(&p, 4).unwrap();
        assert_eq!(v.vector_length, 4);
        assert!(v.channels.iter().all(|c| c.elem_width == 4));
        let one = compile_source(SINGLE).unwrap();
        assert_eq!(vectorize(&one, 1).unwrap(), one);
    }

    #[test]
    fn vectorize_rejects_bad_factors() {
        let p = program("diamond");
        assert_eq!(vectorize(&p, 7), Err(TransformError::VectorDoesNotDivideWidth { v: 7, width: 1024 }));
        assert_eq!(vectorize(&p, 32), Err(TransformError::VectorExceedsBusWidth { v: 32, v_max: 16 }));
        let p = p.with_dimensions(12, 12);
        assert_eq!(vectorize(&p, 3), Err(TransformError::VectorNotPowerOfTwo { v: 3 }));
    }

    #[test]
    fn burst_split_single_task() {
        let p = burst_split(&compile_source(SINGLE).unwrap());
        let shape: Vec<_> = p.tasks.iter().map(|t| (t.name.as_str(), t.kind.keyword())).collect();
        assert_eq!(shape, [("read_in_img", "read"), ("f", "point"), ("write_out_img", "write")]);
        assert!(validate(&extract_graph(&p)).is_ok());
        assert_eq!(burst_split(&p), p);
    }

    #[test]
    fn burst_split_diamond() {
        let p = burst_split(&program("diamond"));
        let names: Vec<_> = p.tasks.iter().map(|t| t.name.as_str()).collect();
        assert_eq!(names, ["read_in_img", "split", "fun1", "fun2", "fun3", "write_out_img"]);
        let g = extract_graph(&p);
        assert!(validate(&g).is_ok());
        for t in &p.tasks {
            let touches_memory = t.reads.iter().chain(&t.writes).any(|x| matches!(x, Port::Image(_)));
            assert_eq!(touches_memory, t.kind.is_burst(), "{}", t.name);
        }
    }

    #[test]
    fn burst_split_fans_out_shared_inputs() {
        let p = burst_split(&program("lucas_kanade"));
        let read = &p.tasks[p.task_by_name("read_frame1").unwrap().0];
        assert_eq!(read.writes.len(), 3);
        assert!(validate(&extract_graph(&p)).is_ok());
    }

    #[test]
    fn burst_split_avoids_name_clashes() {
        let src = r#"channel in_img_stream channel c
            image in_img(8, 8) = input("in.pgm") image out_img(8, 8) = output("out.pgm")
            task a point(pix) reads in_img writes c
            task in_img_stream_1 point(pix) reads c writes out_img"#;
        let p = burst_split(&compile_source(src).unwrap());
        let names: Vec<_> = p.channels.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["in_img_stream", "c", "in_img_stream_2", "out_img_stream"]);
    }

    #[test]
    fn bundles() {
        let mut d = ir(&program("diamond"));
        assign_bundles(&mut d, false);
        assert!(d.interfaces.iter().all(|i| i.bundle == "gmem0"));
        let mut lk = ir(&burst_split(&program("lucas_kanade")));
        assign_bundles(&mut lk, true);
        let bundles: Vec<_> = lk.interfaces.iter().map(|i| i.bundle.as_str()).collect();
        assert_eq!(bundles, ["gmem0", "gmem1", "gmem2", "gmem3"]);
    }

    #[test]
    fn banks_round_robin() {
        let mut d = ir(&program("diamond"));
        let cfg = assign_banks(&mut d, 4);
        assert_eq!(cfg.to_text(), "[connectivity]\nsp=hls_top_1.input_data:DDR[0]\nsp=hls_top_1.output_data:DDR[1]\n");
        assert!(cfg.overflow.is_none());

        let mut five = ir(&program("independent5"));
        five.interfaces.truncate(5);
        let cfg = assign_banks(&mut five, 4);
        assert_eq!(cfg.entries.iter().map(|e| e.bank).collect::<Vec<_>>(), [0, 1, 2, 3, 0]);
        assert_eq!(cfg.overflow, Some(BankOverflowWarning { ports: 5, banks: 4 }));
    }
}
