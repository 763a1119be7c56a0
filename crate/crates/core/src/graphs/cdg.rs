//! Post-dominators and control dependence.

use std::collections::BTreeSet;

use super::cfg::{Cfg, EdgeKind, NodeId};

/// Fixed-size node set.
#[derive(Debug, Clone, PartialEq, Eq)]
struct NodeSet(Vec<u64>);

impl NodeSet {
    fn empty(n: usize) -> Self {
        NodeSet(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut s = NodeSet(vec![u64::MAX; n.div_ceil(64)]);
        let tail = n % 64;
        if tail != 0 {
            *s.0.last_mut().expect("non-empty") = (1u64 << tail) - 1;
        }
        s
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }

    fn intersect(&mut self, other: &NodeSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= b;
        }
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Post-dominator sets computed by iterative dataflow over the reversed CFG.
#[derive(Debug, Clone)]
pub struct PostDominators {
    sets: Vec<NodeSet>,
}

impl PostDominators {
    pub fn compute(cfg: &Cfg) -> Self {
        let n = cfg.node_count();
        let exit = cfg.exit();
        let mut sets: Vec<NodeSet> = (0..n)
            .map(|i| {
                if i == exit {
                    let mut s = NodeSet::empty(n);
                    s.insert(exit);
                    s
                } else {
                    NodeSet::full(n)
                }
            })
            .collect();
        let mut changed = true;
        while changed {
            changed = false;
            // reverse index order visits most nodes after their successors
            for node in (0..n).rev() {
                if node == exit {
                    continue;
                }
                let mut acc = NodeSet::full(n);
                for e in cfg.succs(node) {
                    acc.intersect(&sets[e.to]);
                }
                acc.insert(node);
                if acc != sets[node] {
                    sets[node] = acc;
                    changed = true;
                }
            }
        }
        PostDominators { sets }
    }

    /// Reflexive: every node post-dominates itself.
    pub fn post_dominates(&self, a: NodeId, b: NodeId) -> bool {
        self.sets[b].contains(a)
    }

    /// Immediate post-dominator; `None` only for EXIT.
    pub fn ipdom(&self, n: NodeId) -> Option<NodeId> {
        let size = self.sets[n].len();
        (0..self.sets.len())
            .find(|&d| d != n && self.sets[n].contains(d) && self.sets[d].len() == size - 1)
    }
}

/// Control dependence edges `(condition, dependent, branch)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cdg {
    pub edges: BTreeSet<(NodeId, NodeId, EdgeKind)>,
    node_count: usize,
}

impl Cdg {
    /// Nodes `n` directly depends on.
    pub fn parents(&self, n: NodeId) -> BTreeSet<NodeId> {
        self.edges
            .iter()
            .filter(|(_, to, _)| *to == n)
            .map(|(from, _, _)| *from)
            .collect()
    }

    /// Transitive control dependence ancestors of `n`.
    pub fn ancestors(&self, n: NodeId) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        let mut stack = vec![n];
        while let Some(x) = stack.pop() {
            for p in self.parents(x) {
                if out.insert(p) {
                    stack.push(p);
                }
            }
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }
}

/// `n` is control dependent on `c` via edge `c -> s` iff `n` post-dominates
/// `s` and `n` does not post-dominate `c`.
pub fn control_dependence(cfg: &Cfg) -> Cdg {
    let pdom = PostDominators::compute(cfg);
    let n = cfg.node_count();
    let mut edges = BTreeSet::new();
    for (c, e) in cfg.edges() {
        for node in 0..n {
            if pdom.post_dominates(node, e.to) && !pdom.post_dominates(node, c) {
                edges.insert((c, node, e.kind));
            }
        }
    }
    Cdg {
        edges,
        node_count: n,
    }
}
