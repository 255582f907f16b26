use std::fmt::Write;

use super::{Label, ProcessTree};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub(super) fn to_dot(t: &ProcessTree) -> String {
    let mut out = String::from("digraph process_tree {\n  node [fontname=\"Helvetica\"];\n");
    for v in t.node_ids() {
        let (text, shape) = match t.label(v) {
            Label::Operator(op) => (op.glyph().to_string(), "circle"),
            Label::Activity(a) => (a.as_str().to_string(), "box"),
            Label::Tau => ("τ".to_string(), "box"),
        };
        let style = if matches!(t.label(v), Label::Tau) { ", style=filled, fillcolor=black, fontcolor=white" } else { "" };
        writeln!(out, "  n{} [label=\"{}\", shape={}{}];", v.0, escape(&text), shape, style).unwrap();
    }
    for v in t.node_ids() {
        for c in t.children(v) {
            writeln!(out, "  n{} -> n{};", v.0, c.0).unwrap();
        }
    }
    out.push_str("}\n");
    out
}
