//! Deterministic Graphviz output for reduction graphs and pointer-component
//! graphs.

use std::fmt::Write;

use crate::pc_graph::PcGraph;
use crate::reduction_graph::ReductionGraph;

/// Reality edges are bold, desire edges dashed; vertices `s`, `t`, `I<i>`,
/// `Ip<i>` display their pointer label.
pub fn reduction_graph_dot(g: &ReductionGraph) -> String {
    let mut out = String::from("graph reduction_graph {\n");
    for v in g.vertices() {
        let label = g.label(*v).map_or_else(|| v.name(), |l| l.to_string());
        writeln!(out, "  \"{}\" [label=\"{}\"];", v.name(), label).unwrap();
    }
    for (a, b) in g.reality_edges() {
        writeln!(out, "  \"{}\" -- \"{}\" [style=bold];", a.name(), b.name()).unwrap();
    }
    for (a, b) in g.desire_edges() {
        writeln!(
            out,
            "  \"{}\" -- \"{}\" [style=dashed];",
            a.name(),
            b.name()
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// Edges carry their pointer label; the root is drawn as a double circle.
pub fn pc_graph_dot(g: &PcGraph) -> String {
    let mut out = String::from("graph pc_graph {\n");
    for v in g.vertices() {
        let shape = if g.root() == Some(v) {
            "doublecircle"
        } else {
            "circle"
        };
        writeln!(
            out,
            "  \"{0}\" [label=\"{0}\", shape={1}];",
            v.name(),
            shape
        )
        .unwrap();
    }
    for (e, ends) in g.endpoint_map() {
        let mut it = ends.iter();
        let a = it.next().expect("edges have an endpoint");
        let b = it.next().unwrap_or(a);
        writeln!(
            out,
            "  \"{}\" -- \"{}\" [label=\"{}\"];",
            a.name(),
            b.name(),
            e
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legal_string::LegalString;
    use crate::pc_graph::build_pc_graph;
    use crate::reduction_graph::build_reduction_graph;

    #[test]
    fn pc_dot_for_running_example() {
        let u: LegalString = "5 4 3 7 2 5 6 2 -7 3 4 6".parse().unwrap();
        let dot = pc_graph_dot(&build_pc_graph(&u));
        assert_eq!(dot.lines().filter(|l| l.contains("shape=")).count(), 4);
        assert_eq!(dot.lines().filter(|l| l.contains(" -- ")).count(), 6);
        assert!(dot.contains("\"C1\" -- \"C1\" [label=\"7\"];"));
        assert_eq!(dot, pc_graph_dot(&build_pc_graph(&u)));
    }

    #[test]
    fn empty_reduction_graph_dot() {
        let dot = reduction_graph_dot(&build_reduction_graph(&LegalString::empty()));
        assert_eq!(
            dot,
            "graph reduction_graph {\n  \"s\" [label=\"s\"];\n  \"t\" [label=\"t\"];\n  \"s\" -- \"t\" [style=bold];\n}\n"
        );
    }

    #[test]
    fn reduction_graph_dot_styles() {
        let dot = reduction_graph_dot(&build_reduction_graph(&"2 2".parse().unwrap()));
        assert!(dot.contains("\"Ip1\" -- \"I2\" [style=bold];"));
        assert!(dot.contains("\"Ip1\" -- \"I2\" [style=dashed];"));
        assert!(dot.contains("\"I1\" [label=\"2\"];"));
    }
}
