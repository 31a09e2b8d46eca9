//! Graphviz output for line graphs, region graphs and associated graphs.

use std::fmt::Write;

use crate::assoc::{AssociatedGraph, EdgeColor};
use crate::labeling::{LabeledRegionGraph, RegionKind};
use crate::network::Network;
use crate::region::RegionState;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn line_graph_dot(network: &Network) -> String {
    let mut out = String::from("digraph line_graph {\n  node [shape=box];\n");
    for e in network.link_ids() {
        let label = format!("{e}: {}", network.describe_link(e));
        writeln!(out, "  {} [label={}];", e.get(), quote(&label)).unwrap();
    }
    for e in network.link_ids() {
        for p in network.in_links(e) {
            writeln!(out, "  {} -> {};", p.get(), e.get()).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

fn kind_color(kind: RegionKind) -> &'static str {
    match kind {
        RegionKind::X1 => "lightblue",
        RegionKind::X2 => "palegreen",
        RegionKind::Coding => "gold",
        RegionKind::Singular => "tomato",
    }
}

/// One node per region labeled by its sorted link ids, head starred; with a
/// labeling, nodes are filled by kind.
pub fn region_graph_dot(state: &RegionState, labeled: Option<&LabeledRegionGraph>) -> String {
    let mut out = String::from("digraph region_graph {\n  node [shape=box, style=filled, fillcolor=white];\n");
    for (i, r) in state.decomposition.regions().iter().enumerate() {
        let links: Vec<String> = r
            .links()
            .iter()
            .map(|&l| {
                if l == r.head() {
                    format!("{}*", l.get())
                } else {
                    l.get().to_string()
                }
            })
            .collect();
        let mut label = format!("R{}: {}", i + 1, links.join(" "));
        let mut attrs = String::new();
        if let Some(l) = labeled {
            let kind = l.kind(i);
            write!(label, "\\n{kind:?}").unwrap();
            write!(attrs, ", fillcolor={}", kind_color(kind)).unwrap();
        }
        // labels hold only ids and kind names, nothing to escape
        writeln!(out, "  R{} [label=\"{label}\"{attrs}];", i + 1).unwrap();
    }
    for (p, c) in state.graph.edges() {
        writeln!(out, "  R{} -> R{};", p + 1, c + 1).unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn associated_graph_dot(omega: &AssociatedGraph) -> String {
    let mut out = String::from("graph associated {\n");
    for v in 0..omega.vertex_count() {
        writeln!(out, "  {};", omega.vertex_name(v)).unwrap();
    }
    for &(a, b, color) in &omega.edges {
        let c = match color {
            EdgeColor::Red => "red",
            EdgeColor::Blue => "blue",
            EdgeColor::Green => "green",
        };
        writeln!(
            out,
            "  {} -- {} [color={c}];",
            omega.vertex_name(a),
            omega.vertex_name(b)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
