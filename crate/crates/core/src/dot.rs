//! Graphviz DOT rendering with bottle/neck highlighting.

use std::fmt::Write;

use crate::bottleneck::Bottleneck;
use crate::graph::StructureGraph;

pub const BOTTLE_COLOR: &str = "blue";
pub const NECK_COLOR: &str = "red";
pub const BOTH_COLOR: &str = "violet";

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One digraph; bottle nodes are filled blue, neck nodes red, nodes in
/// both violet, everything else unfilled.
pub fn to_dot(g: &StructureGraph, highlight: Option<&Bottleneck>) -> String {
    let mut out = String::from("digraph G {\n");
    for (v, label) in g.labels().iter().enumerate() {
        let (in_bottle, in_neck) = highlight
            .map(|b| (b.bottle.contains(&v), b.neck.contains(&v)))
            .unwrap_or((false, false));
        let fill = match (in_bottle, in_neck) {
            (true, true) => Some(BOTH_COLOR),
            (true, false) => Some(BOTTLE_COLOR),
            (false, true) => Some(NECK_COLOR),
            (false, false) => None,
        };
        match fill {
            Some(color) => writeln!(
                out,
                "  {} [style=filled, fillcolor={}];",
                quote(label),
                color
            )
            .unwrap(),
            None => writeln!(out, "  {};", quote(label)).unwrap(),
        }
    }
    for (u, v) in g.edges() {
        writeln!(out, "  {} -> {};", quote(g.label(u)), quote(g.label(v))).unwrap();
    }
    out.push_str("}\n");
    out
}
