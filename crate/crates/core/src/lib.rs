//! Exception-aware API lifecycle analysis.
//!
//! The pipeline runs in three stages:
//!
//! 1. [`exir`] parses one EXIR file per released version and [`callgraph`]
//!    orders its methods callees-first.
//! 2. [`summary`] extracts one exception summary per throw site (type,
//!    message pattern, parameter-level precondition), lifting callee
//!    summaries into their callers along the call graph. [`graphs`] supplies
//!    the control flow graphs, control dependence and pre-paths it needs.
//! 3. [`matching`] pairs summaries of same-signature APIs across adjacent
//!    versions and classifies the differences; [`lifecycle`] threads those
//!    pairings into per-API lifecycle models.

pub mod callgraph;
pub mod exir;
pub mod graphs;
pub mod json;
pub mod lifecycle;
pub mod matching;
pub mod summary;
