use std::fmt::Write;

use super::CommGraph;

/// `src,dst,weight` edge list, sorted by (src, dst).
pub fn to_edge_csv(g: &CommGraph) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["src", "dst", "weight"]).expect("in-memory write");
    for ((s, d), weight) in g.edges() {
        w.write_record([s.as_str(), d.as_str(), &weight.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// Graphviz digraph with the message count as `weight` attribute.
pub fn to_dot(g: &CommGraph, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(name));
    for n in g.nodes() {
        let _ = writeln!(out, "  {};", quote(n.as_str()));
    }
    for ((s, d), w) in g.edges() {
        let _ = writeln!(out, "  {} -> {} [weight={w}];", quote(s.as_str()), quote(d.as_str()));
    }
    out.push_str("}\n");
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}
