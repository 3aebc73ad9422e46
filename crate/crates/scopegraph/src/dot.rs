//! Graphviz rendering. Scopes are circles, declarations are boxes.

use std::fmt::Write;

use crate::graph::ScopeGraph;
use crate::EdgeLabel;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders `graph` as a DOT digraph. `describe` produces the text shown in a
/// declaration box; returning `None` hides that declaration.
pub fn to_dot<L: EdgeLabel, D>(
    graph: &ScopeGraph<L, D>,
    describe: impl Fn(L, &D) -> Option<String>,
) -> String {
    let mut out = String::from("digraph scopes {\n");
    if graph.scope_count() == 0 {
        out.push_str("}\n");
        return out;
    }
    out.push_str("  node [shape=circle];\n");
    for s in graph.scopes() {
        let _ = writeln!(out, "  s{} [label=\"{}\"];", s.index(), escape(graph.name(s)));
    }
    for (src, l, tgt) in graph.all_edges() {
        let _ = writeln!(out, "  s{} -> s{} [label=\"{l}\"];", src.index(), tgt.index());
    }
    let mut n = 0;
    for (s, l, d) in graph.all_decls() {
        let Some(text) = describe(l, d) else { continue };
        let _ = writeln!(out, "  d{n} [shape=box, label=\"{}\"];", escape(&text));
        let _ = writeln!(out, "  s{} -> d{n} [label=\"{l}\"];", s.index());
        n += 1;
    }
    out.push_str("}\n");
    out
}
