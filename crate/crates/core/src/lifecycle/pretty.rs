use std::fmt::Write;

use super::{Fragment, LifecycleReport};
use crate::summary::Precondition;

fn show(f: &Fragment) -> String {
    match f {
        Fragment::Text(t) => t.clone(),
        Fragment::Precondition(p) => Precondition::from_clauses(p.iter().cloned()).render(),
    }
}

fn bound(v: &Option<String>) -> &str {
    v.as_deref().unwrap_or("OPEN")
}

/// Human-readable lifecycle listing, one block per API.
pub fn render_text(report: &LifecycleReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mode: {}", report.mode);
    let _ = writeln!(out, "versions: {}", report.versions.join(", "));
    for m in &report.apis {
        let _ = writeln!(out, "\n{}", m.signature);
        for iv in &m.intervals {
            let _ = writeln!(out, "  present [{}, {})", iv.introduced, bound(&iv.removed));
        }
        for e in &m.exceptions {
            let _ = writeln!(
                out,
                "  exception {} [{}, {}) at {}#{}",
                e.lineage_id,
                e.introduced,
                bound(&e.removed),
                e.origin.method,
                e.origin.stmt
            );
            let _ = writeln!(out, "    type: {}", e.initial.exception_type);
            let _ = writeln!(out, "    message: {}", e.initial.message_pattern);
            let _ = writeln!(
                out,
                "    precondition: {}",
                show(&Fragment::Precondition(e.initial.precondition.clone()))
            );
            for ev in &e.events {
                let _ = writeln!(
                    out,
                    "    {} {:?} {:?}: {} -> {}",
                    ev.version,
                    ev.rule,
                    ev.kind,
                    show(&ev.old),
                    show(&ev.new)
                );
            }
        }
    }
    out
}
