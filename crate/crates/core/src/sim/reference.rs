use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{check_inputs, stencil_at, ImageBuf, Images, SimError};
use crate::frontend::{Port, Program, TaskKind};
use crate::graph::{extract_graph, topo_sort, validate};

/// Evaluates the program one whole image per task, in topological order.
/// Returns every host output image by name.
pub fn run_reference(program: &Program, inputs: &Images) -> Result<Images, SimError> {
    let graph = extract_graph(program);
    let report = validate(&graph);
    if !report.is_ok() {
        return Err(SimError::Invalid(report.errors));
    }
    let (w, h) = (program.width, program.height);
    check_inputs(program.host_inputs().map(|(_, i)| i.name.as_str()), w, h, inputs)?;

    let mut values: BTreeMap<Port, Vec<i32>> = BTreeMap::new();
    for (id, img) in program.host_inputs() {
        values.insert(Port::Image(id), inputs[&img.name].data.clone());
    }
    for t in topo_sort(&graph) {
        let task = program.task(t);
        let args: Vec<&Vec<i32>> = task.reads.iter().map(|p| &values[p]).collect();
        let result: Vec<i32> = match &task.kind {
            TaskKind::Point(e) => args[0].iter().map(|&a| e.eval(&[a])).collect(),
            TaskKind::Point2(e) => args[0].iter().zip(args[1]).map(|(&a, &b)| e.eval(&[a, b])).collect(),
            TaskKind::Local(s) => {
                let src = args[0];
                (0..h)
                    .flat_map(|y| (0..w).map(move |x| (x, y)))
                    .map(|(x, y)| stencil_at(s, w, h, x, y, |i| src[i]))
                    .collect()
            }
            TaskKind::Split(_) | TaskKind::Read | TaskKind::Write => args[0].clone(),
        };
        for p in &task.writes {
            values.insert(*p, result.clone());
        }
    }

    Ok(program
        .host_outputs()
        .filter_map(|(id, img)| {
            let data = values.remove(&Port::Image(id))?;
            Some((img.name.clone(), ImageBuf::new(w, h, data)))
        })
        .collect())
}
