//! Direct call graph and the callees-first analysis order.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::exir::ExirProgram;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CallEdge {
    pub caller: usize,
    pub callee: usize,
    /// Source index of the call statement in the caller.
    pub stmt: usize,
}

/// A strongly connected component of the call graph. Methods are program
/// indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccNode {
    pub members: Vec<usize>,
    pub recursive: bool,
}

#[derive(Debug, Clone)]
pub struct CallGraph {
    pub edges: Vec<CallEdge>,
    /// `(caller, stmt)` for calls that leave the program.
    pub external: Vec<(usize, usize)>,
    /// Components in an order where every callee component precedes its
    /// callers.
    pub order: Vec<SccNode>,
    scc_of: Vec<usize>,
    rank_in_scc: Vec<usize>,
}

impl CallGraph {
    /// Flattened method order, callees first.
    pub fn method_order(&self) -> Vec<usize> {
        self.order
            .iter()
            .flat_map(|s| s.members.iter().copied())
            .collect()
    }

    pub fn scc_of(&self, method: usize) -> usize {
        self.scc_of[method]
    }

    /// True when the call `caller -> callee` closes a cycle: both are in the
    /// same component and the callee is not analyzed before the caller.
    pub fn is_back_edge(&self, caller: usize, callee: usize) -> bool {
        self.scc_of[caller] == self.scc_of[callee]
            && self.rank_in_scc[callee] >= self.rank_in_scc[caller]
    }

    /// Groups components into waves; a component's callees all live in
    /// earlier waves.
    pub fn waves(&self) -> Vec<Vec<usize>> {
        let mut level = vec![0usize; self.order.len()];
        for (i, scc) in self.order.iter().enumerate() {
            let mut l = 0;
            for e in &self.edges {
                if scc.members.contains(&e.caller) {
                    let c = self.scc_of[e.callee];
                    if c != i {
                        l = l.max(level[c] + 1);
                    }
                }
            }
            level[i] = l;
        }
        let depth = level.iter().copied().max().map_or(0, |m| m + 1);
        let mut waves = vec![Vec::new(); depth];
        for (i, l) in level.into_iter().enumerate() {
            waves[l].push(i);
        }
        waves
    }
}

pub fn build_call_graph(program: &ExirProgram) -> CallGraph {
    let n = program.methods.len();
    let mut graph: DiGraph<usize, ()> = DiGraph::with_capacity(n, 0);
    let nodes: Vec<NodeIndex> = (0..n).map(|i| graph.add_node(i)).collect();
    let mut edges = Vec::new();
    let mut external = Vec::new();
    for (caller, m) in program.methods.iter().enumerate() {
        for (stmt, s) in m.body.iter().enumerate() {
            if let Some(call) = s.kind.call() {
                match program.resolve_call(call) {
                    Some(callee) => {
                        edges.push(CallEdge {
                            caller,
                            callee,
                            stmt,
                        });
                        if graph.find_edge(nodes[caller], nodes[callee]).is_none() {
                            graph.add_edge(nodes[caller], nodes[callee], ());
                        }
                    }
                    None => external.push((caller, stmt)),
                }
            }
        }
    }

    // tarjan_scc yields components in post-order: callees before callers
    let order: Vec<SccNode> = tarjan_scc(&graph)
        .into_iter()
        .map(|scc| {
            let mut members: Vec<usize> = scc.into_iter().map(|ix| graph[ix]).collect();
            members.sort_unstable();
            let recursive = members.len() > 1
                || graph
                    .find_edge(nodes[members[0]], nodes[members[0]])
                    .is_some();
            SccNode { members, recursive }
        })
        .collect();

    let mut scc_of = vec![0; n];
    let mut rank_in_scc = vec![0; n];
    for (i, scc) in order.iter().enumerate() {
        for (rank, &m) in scc.members.iter().enumerate() {
            scc_of[m] = i;
            rank_in_scc[m] = rank;
        }
    }
    CallGraph {
        edges,
        external,
        order,
        scc_of,
        rank_in_scc,
    }
}
