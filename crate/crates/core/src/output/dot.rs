use std::fmt::Write;

use super::fmt_num;
use crate::hac::Dendrogram;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
}

/// Graphviz digraph with edges from each merge node to its two children.
/// Node `n<i>` is leaf `i` for `i < n` and the merge with that id otherwise.
pub fn to_dot(dendrogram: &Dendrogram) -> String {
    let mut out = String::from("digraph dendrogram {\n  node [shape=box];\n");
    for (i, label) in dendrogram.labels.iter().enumerate() {
        writeln!(out, "  n{i} [label=\"{}\"];", escape(label)).unwrap();
    }
    for m in &dendrogram.merges {
        writeln!(out, "  n{} [label=\"{}\", shape=ellipse];", m.id, fmt_num(m.height)).unwrap();
        for child in dendrogram.ordered_children(m.id).expect("merge id") {
            writeln!(out, "  n{} -> n{child};", m.id).unwrap();
        }
    }
    out.push_str("}\n");
    out
}
