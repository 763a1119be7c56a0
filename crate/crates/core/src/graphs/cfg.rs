use crate::exir::{ExirMethod, StmtKind};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    /// Fallthrough or unconditional jump.
    Flow,
    True,
    False,
    /// A call whose callee may throw leaves the method.
    Exceptional,
    /// Added so that EXIT is reachable from every node.
    Synthetic,
}

impl EdgeKind {
    /// Edges a real execution can follow to a statement.
    pub fn is_normal(self) -> bool {
        matches!(self, EdgeKind::Flow | EdgeKind::True | EdgeKind::False)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub to: NodeId,
    pub kind: EdgeKind,
}

/// Statement-level control flow graph. Statement `i` is node `i`; ENTRY and
/// EXIT are the two nodes after the last statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cfg {
    stmt_count: usize,
    succs: Vec<Vec<Edge>>,
}

impl Cfg {
    /// Builds a graph from raw successor lists over `stmt_count + 2` nodes and
    /// adds synthetic exits where EXIT is unreachable.
    pub fn from_successors(stmt_count: usize, succs: Vec<Vec<Edge>>) -> Cfg {
        assert_eq!(succs.len(), stmt_count + 2, "one successor list per node");
        let mut cfg = Cfg { stmt_count, succs };
        cfg.connect_to_exit();
        cfg
    }

    pub fn stmt_count(&self) -> usize {
        self.stmt_count
    }

    pub fn node_count(&self) -> usize {
        self.stmt_count + 2
    }

    pub fn entry(&self) -> NodeId {
        self.stmt_count
    }

    pub fn exit(&self) -> NodeId {
        self.stmt_count + 1
    }

    pub fn succs(&self, n: NodeId) -> &[Edge] {
        &self.succs[n]
    }

    pub fn preds(&self) -> Vec<Vec<NodeId>> {
        let mut preds = vec![Vec::new(); self.node_count()];
        for (from, edges) in self.succs.iter().enumerate() {
            for e in edges {
                if !preds[e.to].contains(&from) {
                    preds[e.to].push(from);
                }
            }
        }
        preds
    }

    /// Node reached on the true branch of a condition node.
    pub fn true_succ(&self, n: NodeId) -> Option<NodeId> {
        self.succs[n]
            .iter()
            .find(|e| e.kind == EdgeKind::True)
            .map(|e| e.to)
    }

    pub fn is_condition(&self, n: NodeId) -> bool {
        self.succs
            .get(n)
            .is_some_and(|s| s.iter().any(|e| e.kind == EdgeKind::True))
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, Edge)> + '_ {
        self.succs
            .iter()
            .enumerate()
            .flat_map(|(from, es)| es.iter().map(move |e| (from, *e)))
    }

    fn reaches_exit(&self) -> Vec<bool> {
        let preds = self.preds();
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![self.exit()];
        seen[self.exit()] = true;
        while let Some(n) = stack.pop() {
            for &p in &preds[n] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    fn connect_to_exit(&mut self) {
        loop {
            let reach = self.reaches_exit();
            match reach.iter().position(|r| !r) {
                Some(n) => {
                    let exit = self.exit();
                    self.succs[n].push(Edge {
                        to: exit,
                        kind: EdgeKind::Synthetic,
                    });
                }
                None => break,
            }
        }
    }
}

/// Control flow graph with no exceptional call edges.
pub fn build_cfg(method: &ExirMethod) -> Cfg {
    build_cfg_with(method, |_| false)
}

/// Control flow graph where each call statement for which `may_throw` holds
/// also gets an exceptional edge to EXIT.
pub fn build_cfg_with(method: &ExirMethod, may_throw: impl Fn(usize) -> bool) -> Cfg {
    let n = method.body.len();
    let exit = n + 1;
    let next = |i: usize| if i + 1 < n { i + 1 } else { exit };
    let target = |label: &str| {
        method
            .label_index(label)
            .expect("labels are resolved by the parser")
    };
    let flow = |to| Edge {
        to,
        kind: EdgeKind::Flow,
    };

    let mut succs = vec![Vec::new(); n + 2];
    succs[n] = vec![flow(if n == 0 { exit } else { 0 })];
    for (i, stmt) in method.body.iter().enumerate() {
        succs[i] = match &stmt.kind {
            StmtKind::If { target: t, .. } => vec![
                Edge {
                    to: next(i),
                    kind: EdgeKind::False,
                },
                Edge {
                    to: target(t),
                    kind: EdgeKind::True,
                },
            ],
            StmtKind::Goto(t) => vec![flow(target(t))],
            StmtKind::Throw { .. } | StmtKind::Return(_) => vec![flow(exit)],
            kind => {
                let mut out = vec![flow(next(i))];
                if kind.call().is_some() && may_throw(i) {
                    out.push(Edge {
                        to: exit,
                        kind: EdgeKind::Exceptional,
                    });
                }
                out
            }
        };
    }
    Cfg::from_successors(n, succs)
}
