//! Graphviz output.

use std::fmt::Write;

use crate::graph::{DirectedStGraph, Vertex};

/// What to draw attention to.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Highlight {
    /// Edge indices drawn bold and red.
    pub edges: Vec<usize>,
    /// Vertices drawn filled, e.g. the members of an mvs.
    pub vertices: Vec<Vertex>,
}

fn quote(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn to_dot(g: &DirectedStGraph, highlight: &Highlight) -> String {
    let mut out = String::from("digraph G {\n  rankdir=LR;\n");
    for v in 0..g.n() {
        let mut attrs = Vec::new();
        if v == g.source() || v == g.sink() {
            attrs.push("shape=doublecircle");
        }
        if highlight.vertices.contains(&v) {
            attrs.push("style=filled");
            attrs.push("fillcolor=lightblue");
        }
        let attrs = match attrs.is_empty() {
            true => String::new(),
            false => format!(" [{}]", attrs.join(", ")),
        };
        writeln!(out, "  {}{attrs};", quote(g.name(v))).expect("writing to a string");
    }
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let attrs = match highlight.edges.contains(&e) {
            true => " [color=red, penwidth=2]",
            false => "",
        };
        writeln!(
            out,
            "  {} -> {}{attrs};",
            quote(g.name(u)),
            quote(g.name(v))
        )
        .expect("writing to a string");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::samples::*;

    #[test]
    fn plain_wheatstone() {
        let dot = to_dot(&wheatstone(), &Highlight::default());
        assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 5);
        let nodes = dot
            .lines()
            .filter(|l| l.starts_with("  \"") && !l.contains("->"));
        assert_eq!(nodes.count(), 4);
        assert!(!dot.contains("red") && !dot.contains("filled"));
    }

    #[test]
    fn marks_and_escapes() {
        let g =
            DirectedStGraph::from_named_edges("s", "t", &[("s", "a\"b"), ("a\"b", "t")]).unwrap();
        let dot = to_dot(
            &g,
            &Highlight {
                edges: vec![0],
                vertices: vec![1],
            },
        );
        assert!(
            dot.contains(r#""s" -> "a\"b" [color=red, penwidth=2];"#),
            "{dot}"
        );
        assert!(
            dot.contains(r#""a\"b" [style=filled, fillcolor=lightblue];"#),
            "{dot}"
        );
    }
}
