//! Per-method graphs: control flow, post-dominance, control dependence and
//! exception pre-paths.

mod cdg;
mod cfg;
mod dot;
mod paths;

pub use cdg::{control_dependence, Cdg, PostDominators};
pub use cfg::{build_cfg, build_cfg_with, Cfg, Edge, EdgeKind, NodeId};
pub use dot::{cdg_to_dot, cfg_to_dot};
pub use paths::{enumerate_prepaths, PathLimits, PrePaths};
