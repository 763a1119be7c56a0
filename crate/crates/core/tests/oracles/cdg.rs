use std::collections::BTreeSet;

use exlife_core::graphs::{control_dependence, Cfg, Edge, EdgeKind, NodeId};
use rand::Rng;

/// A random graph of at most `max_nodes` nodes including ENTRY and EXIT.
pub fn random_cfg<R: Rng>(rng: &mut R, max_nodes: usize) -> Cfg {
    let stmts = rng.gen_range(1..=max_nodes - 2);
    let exit = stmts + 1;
    let target = |rng: &mut R| {
        if rng.gen_bool(0.2) {
            exit
        } else {
            rng.gen_range(0..stmts)
        }
    };
    let mut succs = vec![Vec::new(); stmts + 2];
    succs[stmts] = vec![Edge {
        to: 0,
        kind: EdgeKind::Flow,
    }];
    for s in succs.iter_mut().take(stmts) {
        *s = if rng.gen_bool(0.4) {
            vec![
                Edge {
                    to: target(rng),
                    kind: EdgeKind::False,
                },
                Edge {
                    to: target(rng),
                    kind: EdgeKind::True,
                },
            ]
        } else {
            vec![Edge {
                to: target(rng),
                kind: EdgeKind::Flow,
            }]
        };
    }
    Cfg::from_successors(stmts, succs)
}

/// Whether some simple path from `from` reaches EXIT without visiting `avoid`.
fn escapes(cfg: &Cfg, from: NodeId, avoid: NodeId, seen: &mut Vec<bool>) -> bool {
    if from == avoid {
        return false;
    }
    if from == cfg.exit() {
        return true;
    }
    seen[from] = true;
    let found = cfg
        .succs(from)
        .iter()
        .any(|e| !seen[e.to] && escapes(cfg, e.to, avoid, seen));
    seen[from] = false;
    found
}

/// `a` post-dominates `b`: every path from `b` to EXIT visits `a`.
pub fn post_dominates(cfg: &Cfg, a: NodeId, b: NodeId) -> bool {
    a == b || !escapes(cfg, b, a, &mut vec![false; cfg.node_count()])
}

/// Control dependence from its definition: one branch of `c` always leads
/// to `n` while `c` itself can avoid `n`.
pub fn brute_force_cdg(cfg: &Cfg) -> BTreeSet<(NodeId, NodeId, EdgeKind)> {
    let mut out = BTreeSet::new();
    for (c, e) in cfg.edges() {
        for n in 0..cfg.node_count() {
            if n != c && post_dominates(cfg, n, e.to) && !post_dominates(cfg, n, c) {
                out.insert((c, n, e.kind));
            }
        }
    }
    out
}

pub fn check_cdg(cfg: &Cfg) -> Result<(), String> {
    let expected = brute_force_cdg(cfg);
    let got = control_dependence(cfg).edges;
    if got == expected {
        Ok(())
    } else {
        Err(format!(
            "graph {:?}: missing {:?}, extra {:?}",
            (0..cfg.node_count())
                .map(|n| cfg.succs(n).to_vec())
                .collect::<Vec<_>>(),
            expected.difference(&got).collect::<Vec<_>>(),
            got.difference(&expected).collect::<Vec<_>>()
        ))
    }
}
