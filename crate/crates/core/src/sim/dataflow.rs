//! Lockstep cycle simulation of a kernel.
//!
//! Every cycle each task decides, from the FIFO occupancies at the start of
//! the cycle, whether to consume one token from each input and whether to
//! produce one token on each output. Pops and pushes commit at the end of the
//! cycle, so a token pushed in cycle `c` is visible to its consumer in
//! `c + 1`. Global memory is always ready.
//!
//! A task with lookahead `la` (a stencil needs `la` tokens beyond output `j`
//! before it can emit `j`) may run up to `la` tokens ahead of its output;
//! streaming tasks have `la = 0` and consume and produce in lockstep. The
//! kernel finishes one cycle after the last firing, and one cycle is charged
//! for the start handshake, so a chain of streaming tasks over `N` tokens
//! takes `N` plus one cycle per task.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_inputs, stencil_at, ImageBuf, Images, SimError};
use crate::frontend::{Program, TaskKind};
use crate::graph::extract_graph;
use crate::schedule::{build_kernel_ir, Direction, IrPort, KernelIr, TaskIr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecMode {
    /// All tasks run concurrently over bounded FIFOs.
    #[default]
    Dataflow,
    /// Tasks run one after another over unbounded buffers.
    Sequential,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimResult {
    pub outputs: Images,
    pub cycles: u64,
    /// Cycles in which each task fired, by source name in schedule order.
    pub per_task_busy: Vec<(String, u64)>,
    /// Peak occupancy of each channel, by source name.
    pub fifo_high_water: Vec<(String, u32)>,
}

type Token = [i32; 16];

/// Builds the kernel IR for `program` and simulates it.
pub fn run_dataflow(program: &Program, inputs: &Images, mode: ExecMode) -> Result<SimResult, SimError> {
    let ir = build_kernel_ir(program, &extract_graph(program))
        .map_err(|crate::schedule::IrError::Invalid(e)| SimError::Invalid(e))?;
    run_ir(&ir, inputs, mode)
}

pub fn run_ir(ir: &KernelIr, inputs: &Images, mode: ExecMode) -> Result<SimResult, SimError> {
    let declared = ir.interfaces.iter().filter(|d| d.direction == Direction::Read).map(|d| d.image_name.as_str());
    check_inputs(declared, ir.width, ir.height, inputs)?;
    let mut sim = Sim::new(ir, inputs);
    let cycles = match mode {
        ExecMode::Dataflow => sim.run(None)?,
        ExecMode::Sequential => {
            let mut total = 0;
            for t in 0..ir.tasks.len() {
                total += sim.run(Some(t))?;
            }
            total
        }
    };
    Ok(sim.finish(cycles))
}

struct TaskState {
    consumed: u64,
    produced: u64,
    lookahead: u64,
    /// Every pixel consumed so far; kept only for stencils.
    history: Vec<i32>,
    busy: u64,
}

struct Sim<'a> {
    ir: &'a KernelIr,
    tokens: u64,
    lanes: usize,
    pixels: usize,
    inputs: Vec<Option<&'a [i32]>>,
    outputs: Vec<Vec<i32>>,
    fifos: Vec<VecDeque<Token>>,
    high_water: Vec<usize>,
    tasks: Vec<TaskState>,
}

enum Action {
    ConsumeProduce,
    Consume,
    Produce,
}

impl<'a> Sim<'a> {
    fn new(ir: &'a KernelIr, inputs: &'a Images) -> Self {
        let pixels = ir.width as usize * ir.height as usize;
        Sim {
            ir,
            tokens: ir.tokens(),
            lanes: ir.vector_length as usize,
            pixels,
            inputs: ir
                .interfaces
                .iter()
                .map(|d| (d.direction == Direction::Read).then(|| inputs[&d.image_name].data.as_slice()))
                .collect(),
            outputs: ir
                .interfaces
                .iter()
                .map(|d| if d.direction == Direction::Write { vec![0; pixels] } else { Vec::new() })
                .collect(),
            fifos: ir.channels.iter().map(|_| VecDeque::new()).collect(),
            high_water: vec![0; ir.channels.len()],
            tasks: ir
                .tasks
                .iter()
                .map(|t| TaskState {
                    consumed: 0,
                    produced: 0,
                    lookahead: t.kind.lookahead_tokens(ir.width, ir.vector_length),
                    history: Vec::new(),
                    busy: 0,
                })
                .collect(),
        }
    }

    fn finish(self, cycles: u64) -> SimResult {
        let ir = self.ir;
        let outputs = ir
            .interfaces
            .iter()
            .zip(self.outputs)
            .filter(|(d, _)| d.direction == Direction::Write)
            .map(|(d, data)| (d.image_name.clone(), ImageBuf::new(ir.width, ir.height, data)))
            .collect();
        SimResult {
            outputs,
            cycles,
            per_task_busy: ir.tasks.iter().zip(&self.tasks).map(|(t, s)| (t.source_name.clone(), s.busy)).collect(),
            fifo_high_water: ir
                .channels
                .iter()
                .zip(&self.high_water)
                .map(|(c, &h)| (c.source_name.clone(), h as u32))
                .collect(),
        }
    }

    fn done(&self, t: usize) -> bool {
        self.tasks[t].produced == self.tokens
    }

    /// Runs until every task in scope has finished. `only` restricts firing
    /// to one task with unbounded output buffers (sequential mode). Returns
    /// the cycles taken.
    fn run(&mut self, only: Option<usize>) -> Result<u64, SimError> {
        let scope: Vec<usize> = match only {
            Some(t) => vec![t],
            None => (0..self.ir.tasks.len()).collect(),
        };
        let mut cycle: u64 = 0;
        let mut last_fire: Option<u64> = None;
        let mut pops: Vec<usize> = Vec::new();
        let mut pushes: Vec<(usize, Token)> = Vec::new();
        while !scope.iter().all(|&t| self.done(t)) {
            let mut fired = false;
            for &t in &scope {
                let Some(action) = self.decide(t, only.is_some()) else { continue };
                self.fire(t, action, &mut pops, &mut pushes);
                fired = true;
            }
            for c in pops.drain(..) {
                self.fifos[c].pop_front().expect("pop from empty FIFO");
            }
            for (c, tok) in pushes.drain(..) {
                self.fifos[c].push_back(tok);
                self.high_water[c] = self.high_water[c].max(self.fifos[c].len());
            }
            if fired {
                last_fire = Some(cycle);
            } else {
                let blocked =
                    scope.iter().filter(|&&t| !self.done(t)).map(|&t| self.ir.tasks[t].source_name.clone()).collect();
                return Err(SimError::Deadlock { cycle, blocked });
            }
            cycle += 1;
        }
        Ok(last_fire.map_or(0, |c| c + 2))
    }

    fn decide(&self, t: usize, unbounded: bool) -> Option<Action> {
        let task = &self.ir.tasks[t];
        let s = &self.tasks[t];
        let n = self.tokens;
        let inputs_ready = task.in_channels().all(|c| !self.fifos[c].is_empty());
        let outputs_free =
            unbounded || task.out_channels().all(|c| self.fifos[c].len() < self.ir.channels[c].depth as usize);
        // Output `produced` needs input tokens up to `produced + lookahead`.
        let needed = n.min(s.produced + s.lookahead + 1);
        let can_consume = s.consumed < n && inputs_ready;
        let can_produce = s.produced < n && outputs_free;
        if can_consume && can_produce && s.consumed + 1 >= needed {
            Some(Action::ConsumeProduce)
        } else if can_consume && s.consumed + 1 - s.produced <= s.lookahead {
            Some(Action::Consume)
        } else if can_produce && s.consumed >= needed {
            Some(Action::Produce)
        } else {
            None
        }
    }

    fn fire(&mut self, t: usize, action: Action, pops: &mut Vec<usize>, pushes: &mut Vec<(usize, Token)>) {
        let task: &TaskIr = &self.ir.tasks[t];
        let mut operands: Vec<Token> = Vec::new();
        if matches!(action, Action::ConsumeProduce | Action::Consume) {
            let index = self.tasks[t].consumed;
            for port in &task.reads {
                operands.push(match *port {
                    IrPort::Channel(c) => {
                        pops.push(c);
                        self.fifos[c][0]
                    }
                    IrPort::Global(g) => self.load(g, index),
                });
            }
            let state = &mut self.tasks[t];
            if let TaskKind::Local(_) = task.kind {
                let base = index as usize * self.lanes;
                for (l, &px) in operands[0].iter().take(self.lanes).enumerate() {
                    if base + l < self.pixels {
                        state.history.push(px);
                    }
                }
            }
            state.consumed += 1;
        }
        if matches!(action, Action::ConsumeProduce | Action::Produce) {
            let j = self.tasks[t].produced;
            let out = self.compute(t, j, &operands);
            for port in &task.writes {
                match *port {
                    IrPort::Channel(c) => pushes.push((c, out)),
                    IrPort::Global(g) => self.store(g, j, &out),
                }
            }
            self.tasks[t].produced += 1;
        }
        self.tasks[t].busy += 1;
    }

    fn load(&self, g: usize, index: u64) -> Token {
        let data = self.inputs[g].expect("read from an output port");
        let mut tok = [0; 16];
        let base = index as usize * self.lanes;
        for (l, slot) in tok.iter_mut().take(self.lanes).enumerate() {
            if let Some(&px) = data.get(base + l) {
                *slot = px;
            }
        }
        tok
    }

    fn store(&mut self, g: usize, index: u64, tok: &Token) {
        let base = index as usize * self.lanes;
        let pixels = self.pixels;
        let data = &mut self.outputs[g];
        for (l, &px) in tok.iter().take(self.lanes).enumerate() {
            if base + l < pixels {
                data[base + l] = px;
            }
        }
    }

    /// Output token `j` of task `t`. Streaming kinds map the operands they
    /// consumed this cycle; stencils read their pixel history.
    fn compute(&self, t: usize, j: u64, operands: &[Token]) -> Token {
        let task = &self.ir.tasks[t];
        let mut out = [0; 16];
        match &task.kind {
            TaskKind::Point(e) => {
                for l in 0..self.lanes {
                    out[l] = e.eval(&[operands[0][l]]);
                }
            }
            TaskKind::Point2(e) => {
                for l in 0..self.lanes {
                    out[l] = e.eval(&[operands[0][l], operands[1][l]]);
                }
            }
            TaskKind::Split(_) | TaskKind::Read | TaskKind::Write => out = operands[0],
            TaskKind::Local(s) => {
                let (w, h) = (self.ir.width, self.ir.height);
                let history = &self.tasks[t].history;
                let r = s.radius() as usize;
                for (l, slot) in out.iter_mut().take(self.lanes).enumerate() {
                    let p = j as usize * self.lanes + l;
                    if p >= self.pixels {
                        break;
                    }
                    let (x, y) = ((p % w as usize) as u32, (p / w as usize) as u32);
                    // Furthest pixel the window can touch after clamping.
                    let last_row = (y as usize + r).min(h as usize - 1);
                    let last_col = (x as usize + r).min(w as usize - 1);
                    let furthest = last_row * w as usize + last_col;
                    assert!(
                        furthest < history.len(),
                        "{} emitted token {j} before consuming pixel {furthest}",
                        task.source_name
                    );
                    *slot = stencil_at(s, w, h, x, y, |i| history[i]);
                }
            }
        }
        out
    }
}
