//! Graphviz renderings for debugging.

use std::fmt::Write;

use super::cdg::Cdg;
use super::cfg::{Cfg, EdgeKind, NodeId};
use crate::exir::ExirMethod;

fn node_label(method: &ExirMethod, cfg: &Cfg, n: NodeId) -> String {
    if n == cfg.entry() {
        "ENTRY".to_string()
    } else if n == cfg.exit() {
        "EXIT".to_string()
    } else {
        format!("{n}: {}", method.body[n].kind)
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn edge_attr(kind: EdgeKind) -> &'static str {
    match kind {
        EdgeKind::Flow => "",
        EdgeKind::True => " [label=\"T\"]",
        EdgeKind::False => " [label=\"F\"]",
        EdgeKind::Exceptional => " [style=dashed,label=\"exc\"]",
        EdgeKind::Synthetic => " [style=dotted]",
    }
}

fn header(out: &mut String, name: &str, method: &ExirMethod, cfg: &Cfg) {
    let _ = writeln!(
        out,
        "digraph \"{}\" {{",
        escape(&format!("{name} {}", method.id))
    );
    for n in 0..cfg.node_count() {
        let _ = writeln!(
            out,
            "  n{n} [shape=box,label=\"{}\"];",
            escape(&node_label(method, cfg, n))
        );
    }
}

pub fn cfg_to_dot(method: &ExirMethod, cfg: &Cfg) -> String {
    let mut out = String::new();
    header(&mut out, "cfg", method, cfg);
    for (from, e) in cfg.edges() {
        let _ = writeln!(out, "  n{from} -> n{}{};", e.to, edge_attr(e.kind));
    }
    out.push_str("}\n");
    out
}

pub fn cdg_to_dot(method: &ExirMethod, cfg: &Cfg, cdg: &Cdg) -> String {
    let mut out = String::new();
    header(&mut out, "cdg", method, cfg);
    for &(from, to, kind) in &cdg.edges {
        let _ = writeln!(out, "  n{from} -> n{to}{};", edge_attr(kind));
    }
    out.push_str("}\n");
    out
}
