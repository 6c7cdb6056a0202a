use std::fmt::Write;

use gonality::{Divisor, Multigraph};

/// Beyond this many parallel edges a single labelled edge is drawn.
pub const MAX_DRAWN_PARALLEL: u32 = 6;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz text for `g`, with chip counts in the vertex labels when a divisor is given.
pub fn emit_dot(g: &Multigraph, divisor: Option<&Divisor>) -> String {
    let mut out = String::from("graph G {\n");
    for v in 0..g.vertex_count() {
        let name = g.label(v);
        let label = match divisor {
            Some(d) => format!("{name}:{}", d.get(v)),
            None => name.to_string(),
        };
        let _ = writeln!(out, "  {} [label={}];", quote(name), quote(&label));
    }
    for (u, v, m) in g.edges() {
        let (a, b) = (quote(g.label(u)), quote(g.label(v)));
        if m <= MAX_DRAWN_PARALLEL {
            for _ in 0..m {
                let _ = writeln!(out, "  {a} -- {b};");
            }
        } else {
            let _ = writeln!(out, "  {a} -- {b} [label=\"×{m}\"];");
        }
    }
    out.push_str("}\n");
    out
}
