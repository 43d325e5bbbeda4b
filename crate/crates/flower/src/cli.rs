//! The `flower` command line: `compile`, `graph`, `estimate` and `simulate`.
//!
//! Exit status is 0 on success, 1 when the program or the arguments are
//! rejected, and 2 when a file cannot be read or written. Diagnostics go to
//! stderr, data to stdout.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use flower_core::emit::{self, EmittedUnit, UnitKind, Vendor};
use flower_core::frontend::{compile_source, FrontendError, Program};
use flower_core::graph::{extract_graph, to_dot, validate, GraphWarning};
use flower_core::schedule::{build_kernel_ir, estimate_kernel_latency, IrError, KernelIr, ReportMode};
use flower_core::sim::{run_dataflow, run_reference, ExecMode, Images, SimResult};
use flower_core::transform::{assign_banks, assign_bundles, burst_split, vectorize};

use crate::diag::{color_enabled, graph_error_span, Diagnostic};
use crate::pgm;

#[derive(Debug, Parser)]
#[command(name = "flower", version, about = "Dataflow compiler for .flo image pipelines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate kernel and host sources.
    Compile(CompileArgs),
    /// Validate the dataflow graph and print it as DOT.
    Graph(GraphArgs),
    /// Print the analytic latency of the kernel.
    Estimate(EstimateArgs),
    /// Run the program on PGM images.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct Pipeline {
    /// Program source (.flo).
    file: PathBuf,
    /// Vector length; defaults to the program's `vector_length`.
    #[arg(long = "vec", value_name = "N")]
    vec: Option<u32>,
    /// Keep global memory accesses inside the compute tasks.
    #[arg(long)]
    no_burst: bool,
    /// Minimum depth of automatically sized FIFOs.
    #[arg(long, value_name = "N")]
    fifo_depth: Option<u32>,
    /// Override the image size.
    #[arg(long, value_name = "WxH", value_parser = parse_size)]
    size: Option<(u32, u32)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    VitisHls,
    XilinxOcl,
    IntelOcl,
}

#[derive(Debug, Args)]
struct CompileArgs {
    #[command(flatten)]
    pipeline: Pipeline,
    #[arg(long, value_enum, default_value = "vitis-hls")]
    target: Target,
    /// Give every memory port its own AXI bundle and memory bank.
    #[arg(long)]
    gmem_opt: bool,
    /// Number of memory banks for link.cfg (default 4).
    #[arg(long, value_name = "N")]
    banks: Option<u32>,
    /// Output directory.
    #[arg(short = 'o', long = "out", value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Default xclbin path baked into the Vitis host.
    #[arg(long, value_name = "PATH")]
    xclbin: Option<String>,
    /// OpenCL only: emit one sequential kernel instead of a dataflow kernel set.
    #[arg(long)]
    no_dataflow: bool,
}

#[derive(Debug, Args)]
struct GraphArgs {
    file: PathBuf,
    /// Only report diagnostics.
    #[arg(long)]
    validate_only: bool,
    /// Split global memory accesses into read and write tasks first.
    #[arg(long)]
    burst: bool,
    /// Write the DOT text to a file instead of stdout.
    #[arg(short = 'o', long = "out", value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Sequential,
    Dataflow,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Kv,
    Table,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[command(flatten)]
    pipeline: Pipeline,
    /// Pin the latency of a task, by source or schedule name.
    #[arg(long = "override", value_name = "TASK=L", value_parser = parse_override)]
    overrides: Vec<(String, u64)>,
    #[arg(long, value_enum, default_value = "both")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "kv")]
    format: Format,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    pipeline: Pipeline,
    /// Input image, by declared name; unbound inputs are read from their
    /// declared path relative to the program.
    #[arg(long = "input", value_name = "NAME=PATH", value_parser = parse_input)]
    inputs: Vec<(String, PathBuf)>,
    /// Output directory.
    #[arg(short = 'o', long = "out", value_name = "DIR", default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    mode: Mode,
    /// Also run the reference interpreter and fail on any difference.
    #[arg(long)]
    check: bool,
}

fn parse_size(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WxH")?;
    let dim = |d: &str| d.parse::<u32>().ok().filter(|&v| v > 0).ok_or(format!("invalid dimension `{d}`"));
    Ok((dim(w)?, dim(h)?))
}

fn parse_override(s: &str) -> Result<(String, u64), String> {
    let (task, l) = s.split_once('=').ok_or("expected TASK=L")?;
    let l = l.parse().map_err(|_| format!("invalid latency `{l}`"))?;
    Ok((task.to_string(), l))
}

fn parse_input(s: &str) -> Result<(String, PathBuf), String> {
    let (name, path) = s.split_once('=').ok_or("expected NAME=PATH")?;
    Ok((name.to_string(), PathBuf::from(path)))
}

enum Failure {
    Rejected(Vec<Diagnostic>),
    Io(String),
}

impl Failure {
    fn one(d: Diagnostic) -> Self {
        Failure::Rejected(vec![d])
    }
}

struct Session<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    color: bool,
}

impl Session<'_> {
    fn emit(&mut self, d: &Diagnostic) {
        let _ = writeln!(self.err, "{}", d.render(self.color));
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().ansi().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                0
            } else {
                let _ = write!(err, "{}", if color_enabled() { text } else { e.render().to_string() });
                1
            };
        }
    };
    let mut s = Session { out, err, color: color_enabled() };
    let result = match &cli.command {
        Command::Compile(a) => compile(&mut s, a),
        Command::Graph(a) => graph(&mut s, a),
        Command::Estimate(a) => estimate(&mut s, a),
        Command::Simulate(a) => simulate(&mut s, a),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Rejected(diags)) => {
            for d in &diags {
                s.emit(d);
            }
            1
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(s.err, "flower: error: {msg}");
            2
        }
    }
}

fn load(path: &Path) -> Result<Program, Failure> {
    let source =
        std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    compile_source(&source).map_err(|e: FrontendError| Failure::one(Diagnostic::error(path, Some(e.span()), &e)))
}

/// Applies the program rewrites the flags ask for and builds the kernel IR.
fn prepare(s: &mut Session, p: &Pipeline, program: Program) -> Result<(Program, KernelIr), Failure> {
    let file = &p.file;
    let mut program = match p.size {
        Some((w, h)) => program.with_dimensions(w, h),
        None => program,
    };
    let v = p.vec.unwrap_or(program.vector_length);
    program = vectorize(&program, v).map_err(|e| Failure::one(Diagnostic::error(file, None, e)))?;
    if let Some(depth) = p.fifo_depth {
        if depth < 2 {
            return Err(Failure::one(Diagnostic::error(
                file,
                None,
                format_args!("--fifo-depth {depth}: FIFOs need at least 2 slots"),
            )));
        }
        program.default_fifo_depth = depth;
    }
    if !p.no_burst {
        program = burst_split(&program);
    }
    let ir = checked_ir(s, file, &program)?;
    Ok((program, ir))
}

fn report_warnings(s: &mut Session, file: &Path, warnings: &[GraphWarning]) {
    for w in warnings {
        s.emit(&Diagnostic::warning(file, None, w));
    }
}

fn checked_ir(s: &mut Session, file: &Path, program: &Program) -> Result<KernelIr, Failure> {
    let graph = extract_graph(program);
    let report = validate(&graph);
    report_warnings(s, file, &report.warnings);
    build_kernel_ir(program, &graph).map_err(|IrError::Invalid(errors)| {
        Failure::Rejected(errors.iter().map(|e| Diagnostic::error(file, graph_error_span(program, e), e)).collect())
    })
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))
}

fn compile(s: &mut Session, a: &CompileArgs) -> Result<(), Failure> {
    let file = &a.pipeline.file;
    let program = load(file)?;
    let (_, mut ir) = prepare(s, &a.pipeline, program)?;
    if a.no_dataflow && a.target == Target::VitisHls {
        return Err(Failure::one(Diagnostic::error(file, None, "--no-dataflow only applies to the OpenCL targets")));
    }
    assign_bundles(&mut ir, a.gmem_opt);
    let mut units: Vec<EmittedUnit> = Vec::new();
    if a.gmem_opt || a.banks.is_some() {
        let banks = a.banks.unwrap_or(4);
        if banks == 0 {
            return Err(Failure::one(Diagnostic::error(file, None, "--banks must be at least 1")));
        }
        let link = assign_banks(&mut ir, banks);
        if let Some(w) = &link.overflow {
            s.emit(&Diagnostic::warning(file, None, w));
        }
        units.push(EmittedUnit { file_name: "link.cfg".into(), source_text: link.to_text(), kind: UnitKind::LinkCfg });
    }
    let no_interface = |e: emit::EmitError| Failure::one(Diagnostic::error(file, None, e));
    let mut emitted = match a.target {
        Target::VitisHls => {
            let host = match &a.xclbin {
                Some(path) => emit::emit_host_with_binary(&ir, path),
                None => emit::emit_host(&ir),
            };
            vec![emit::emit_top_kernel(&ir), host.map_err(no_interface)?]
        }
        Target::XilinxOcl | Target::IntelOcl => {
            let vendor = if a.target == Target::XilinxOcl { Vendor::Xilinx } else { Vendor::Intel };
            let dataflow = !a.no_dataflow;
            vec![
                emit::emit_ocl_kernel(&ir, vendor, dataflow),
                emit::emit_ocl_host(&ir, vendor, dataflow).map_err(no_interface)?,
            ]
        }
    };
    emitted.append(&mut units);
    create_dir(&a.out)?;
    for u in &emitted {
        let path = a.out.join(&u.file_name);
        write_file(&path, u.source_text.as_bytes())?;
        let _ = writeln!(s.out, "wrote {} ({} lines)", path.display(), u.source_text.lines().count());
    }
    Ok(())
}

fn graph(s: &mut Session, a: &GraphArgs) -> Result<(), Failure> {
    let mut program = load(&a.file)?;
    if a.burst {
        program = burst_split(&program);
    }
    let graph = extract_graph(&program);
    let report = validate(&graph);
    report_warnings(s, &a.file, &report.warnings);
    if !report.is_ok() {
        return Err(Failure::Rejected(
            report.errors.iter().map(|e| Diagnostic::error(&a.file, graph_error_span(&program, e), e)).collect(),
        ));
    }
    if a.validate_only {
        let _ =
            writeln!(s.out, "{}: ok ({} tasks, {} channels)", a.file.display(), graph.nodes.len(), graph.edges.len());
        return Ok(());
    }
    let dot = to_dot(&graph);
    match &a.out {
        Some(path) => write_file(path, dot.as_bytes()),
        None => {
            let _ = s.out.write_all(dot.as_bytes());
            Ok(())
        }
    }
}

fn report_mode(m: Mode) -> ReportMode {
    match m {
        Mode::Sequential => ReportMode::Sequential,
        Mode::Dataflow => ReportMode::Dataflow,
        Mode::Both => ReportMode::Both,
    }
}

fn estimate(s: &mut Session, a: &EstimateArgs) -> Result<(), Failure> {
    let file = &a.pipeline.file;
    let program = load(file)?;
    let (_, ir) = prepare(s, &a.pipeline, program)?;
    let report =
        estimate_kernel_latency(&ir, &a.overrides).map_err(|e| Failure::one(Diagnostic::error(file, None, e)))?;
    let text = match a.format {
        Format::Kv => report.to_kv(report_mode(a.mode)),
        Format::Table => report.to_table(report_mode(a.mode)),
    };
    let _ = s.out.write_all(text.as_bytes());
    Ok(())
}

fn simulate(s: &mut Session, a: &SimulateArgs) -> Result<(), Failure> {
    let file = &a.pipeline.file;
    let program = load(file)?;
    let base = file.parent().unwrap_or(Path::new("."));

    let mut images = Images::new();
    for (name, _) in &a.inputs {
        if !program.host_inputs().any(|(_, img)| img.name == *name) {
            let msg = format!("`{name}` is not an input image of the program");
            return Err(Failure::one(Diagnostic::error(file, None, msg)));
        }
    }
    for (_, img) in program.host_inputs() {
        let path = match a.inputs.iter().find(|(n, _)| *n == img.name) {
            Some((_, p)) => p.clone(),
            None => base.join(img.path().unwrap_or_default()),
        };
        let buf = pgm::read(&path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
        images.insert(img.name.clone(), buf);
    }

    // Without an explicit size the program runs at the size of its inputs.
    let mut pipeline_size = a.pipeline.size;
    if pipeline_size.is_none() {
        if let Some(first) = images.values().next() {
            pipeline_size = Some((first.width, first.height));
        }
    }
    let pipeline = Pipeline {
        file: file.clone(),
        vec: a.pipeline.vec,
        no_burst: a.pipeline.no_burst,
        fifo_depth: a.pipeline.fifo_depth,
        size: pipeline_size,
    };
    let (program, _) = prepare(s, &pipeline, program)?;
    let sim_error = |e: flower_core::sim::SimError| Failure::one(Diagnostic::error(file, None, e));

    let modes: &[ExecMode] = match a.mode {
        Mode::Dataflow => &[ExecMode::Dataflow],
        Mode::Sequential => &[ExecMode::Sequential],
        Mode::Both => &[ExecMode::Dataflow, ExecMode::Sequential],
    };
    let mut results: Vec<(ExecMode, SimResult)> = Vec::new();
    for &mode in modes {
        results.push((mode, run_dataflow(&program, &images, mode).map_err(sim_error)?));
    }
    let (_, first) = &results[0];
    for (task, busy) in &first.per_task_busy {
        let _ = writeln!(s.out, "task={task} busy={busy}");
    }
    for (chan, high) in &first.fifo_high_water {
        let _ = writeln!(s.out, "channel={chan} high_water={high}");
    }
    for (mode, r) in results.iter().rev() {
        let key = if *mode == ExecMode::Sequential { "sequential" } else { "dataflow" };
        let _ = writeln!(s.out, "{key}={}", r.cycles);
    }

    if a.check {
        let reference = run_reference(&program, &images).map_err(sim_error)?;
        for (mode, r) in &results {
            if let Some(msg) = first_difference(&r.outputs, &reference) {
                let msg = format!("{mode:?} simulation differs from the reference: {msg}");
                return Err(Failure::one(Diagnostic::error(file, None, msg)));
            }
        }
        let _ = writeln!(s.out, "check=ok");
    }

    create_dir(&a.out)?;
    for (_, img) in program.host_outputs() {
        let Some(buf) = first.outputs.get(&img.name) else { continue };
        let name = Path::new(img.path().unwrap_or(&img.name))
            .file_name()
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(&img.name));
        let path = a.out.join(name);
        pgm::write(&path, buf).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn first_difference(got: &Images, want: &Images) -> Option<String> {
    for (name, w) in want {
        let Some(g) = got.get(name) else { return Some(format!("image `{name}` is missing")) };
        if let Some(i) = g.data.iter().zip(&w.data).position(|(a, b)| a != b) {
            let (x, y) = (i as u32 % w.width, i as u32 / w.width);
            return Some(format!("`{name}` at ({x}, {y}) is {}, expected {}", g.data[i], w.data[i]));
        }
    }
    None
}
