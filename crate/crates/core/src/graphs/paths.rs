use super::cfg::{Cfg, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathLimits {
    /// Maximum number of paths kept per throw site.
    pub path_cap: usize,
    /// How many times a loop may be re-entered along one path.
    pub loop_unroll: usize,
}

impl Default for PathLimits {
    fn default() -> Self {
        PathLimits {
            path_cap: 256,
            loop_unroll: 1,
        }
    }
}

/// Pre-paths of one throw site. Each path lists statement nodes from the
/// first statement to the site, inclusive.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrePaths {
    pub paths: Vec<Vec<NodeId>>,
    pub truncated: bool,
    pub unreachable: bool,
}

const STEP_BUDGET: usize = 200_000;

struct Search<'a> {
    cfg: &'a Cfg,
    site: NodeId,
    reaches_site: Vec<bool>,
    visits: Vec<usize>,
    max_visits: usize,
    path: Vec<NodeId>,
    out: PrePaths,
    cap: usize,
    steps: usize,
}

impl Search<'_> {
    fn dfs(&mut self, n: NodeId) {
        if self.out.truncated {
            return;
        }
        self.steps += 1;
        if self.steps > STEP_BUDGET {
            self.out.truncated = true;
            return;
        }
        self.path.push(n);
        self.visits[n] += 1;
        if n == self.site {
            if self.out.paths.len() == self.cap {
                self.out.truncated = true;
            } else {
                self.out.paths.push(self.path.clone());
            }
        } else {
            let succs = self.cfg.succs(n);
            for (i, e) in succs.iter().enumerate() {
                let to = e.to;
                // a branch whose arms meet immediately yields one path
                let repeat = succs[..i].iter().any(|p| p.to == to && p.kind.is_normal());
                if e.kind.is_normal()
                    && !repeat
                    && self.reaches_site[to]
                    && self.visits[to] < self.max_visits
                {
                    self.dfs(to);
                }
            }
        }
        self.visits[n] -= 1;
        self.path.pop();
    }
}

/// Enumerates entry-to-site paths over normal control flow in DFS order,
/// following false branches before true branches. A node may appear at most
/// `loop_unroll + 1` times on one path, so each loop runs 0..=loop_unroll
/// extra times.
pub fn enumerate_prepaths(cfg: &Cfg, site: NodeId, limits: PathLimits) -> PrePaths {
    let n = cfg.node_count();
    let mut reaches_site = vec![false; n];
    let mut preds = vec![Vec::new(); n];
    for (from, e) in cfg.edges() {
        if e.kind.is_normal() {
            preds[e.to].push(from);
        }
    }
    let mut stack = vec![site];
    reaches_site[site] = true;
    while let Some(x) = stack.pop() {
        for &p in &preds[x] {
            if !reaches_site[p] {
                reaches_site[p] = true;
                stack.push(p);
            }
        }
    }

    let mut search = Search {
        cfg,
        site,
        reaches_site,
        visits: vec![0; n],
        max_visits: limits.loop_unroll + 1,
        path: Vec::new(),
        out: PrePaths::default(),
        cap: limits.path_cap,
        steps: 0,
    };
    if cfg.stmt_count() > 0 && search.reaches_site[0] {
        search.dfs(0);
    }
    let mut out = search.out;
    out.unreachable = out.paths.is_empty() && !out.truncated;
    out
}
