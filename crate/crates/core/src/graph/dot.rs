use alloc::string::String;
use core::fmt::Write;

use super::{is_split, DataflowGraph};

/// Graphviz rendering. Tasks are ellipses (splits are inverted triangles),
/// host images are boxes joined to their tasks by dashed edges, and channel
/// edges carry the channel name.
pub fn to_dot(graph: &DataflowGraph) -> String {
    let mut out = String::from("digraph {\n");
    for n in &graph.nodes {
        let shape = if is_split(n.kind) { "invtriangle" } else { "ellipse" };
        let _ = writeln!(out, "  \"{}\" [shape={shape}];", n.name);
    }
    for m in &graph.memories {
        let _ = writeln!(out, "  \"{}\" [shape=box];", m.name);
    }
    for m in &graph.memories {
        for r in &m.readers {
            let _ = writeln!(out, "  \"{}\" -> \"{}\" [style=dashed];", m.name, graph.nodes[r.0].name);
        }
        for w in &m.writers {
            let _ = writeln!(out, "  \"{}\" -> \"{}\" [style=dashed];", graph.nodes[w.0].name, m.name);
        }
    }
    for e in &graph.edges {
        for p in &e.producers {
            for c in &e.consumers {
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [label=\"{}\"];",
                    graph.nodes[p.0].name, graph.nodes[c.0].name, e.name
                );
            }
        }
    }
    out.push_str("}\n");
    out
}
