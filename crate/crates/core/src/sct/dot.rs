//! Graphviz rendering of size-change graphs.

use std::fmt::Write;

use super::scg::Scg;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One graph: a column of variables before the assignment and one after.
pub fn scg_to_dot(g: &Scg, title: &str) -> String {
    concatenation_to_dot(std::slice::from_ref(g), title)
}

/// Consecutive graphs glued column to column, as in a trace of a loop body.
pub fn concatenation_to_dot(graphs: &[Scg], title: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(title)).unwrap();
    writeln!(out, "  rankdir=LR;\n  node [shape=plaintext];\n  label={};", quote(title)).unwrap();
    let Some(first) = graphs.first() else {
        out.push_str("}\n");
        return out;
    };
    let vars = first.vars();
    for col in 0..=graphs.len() {
        writeln!(out, "  subgraph cluster_{col} {{\n    label=\"{col}\";\n    color=lightgrey;").unwrap();
        for v in vars.names() {
            writeln!(out, "    {} [label={}];", quote(&format!("{v}_{col}")), quote(v)).unwrap();
        }
        out.push_str("  }\n");
    }
    for (col, g) in graphs.iter().enumerate() {
        for (from, to, down) in g.named_edges() {
            let a = quote(&format!("{from}_{col}"));
            let b = quote(&format!("{to}_{}", col + 1));
            if down {
                writeln!(out, "  {a} -> {b} [label=\"↓\", style=bold, color=red];").unwrap();
            } else {
                writeln!(out, "  {a} -> {b};").unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}
