//! Summary report data model.

use std::collections::BTreeSet;
use std::fmt::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::exir::MethodId;
use crate::graphs::PathLimits;

use super::precondition::{Clause, Precondition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Only throws written in each API body.
    Intra,
    /// Callee exceptions are lifted into their callers.
    Inter,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Intra => "intra",
            Mode::Inter => "inter",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "intra" => Ok(Mode::Intra),
            "inter" => Ok(Mode::Inter),
            other => Err(format!("unknown mode `{other}` (expected intra or inter)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Limits {
    pub path_cap: usize,
    pub loop_unroll: usize,
    pub clause_limit: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            path_cap: 256,
            loop_unroll: 1,
            clause_limit: 16,
        }
    }
}

impl Limits {
    pub fn paths(&self) -> PathLimits {
        PathLimits {
            path_cap: self.path_cap,
            loop_unroll: self.loop_unroll,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractOptions {
    pub mode: Mode,
    pub limits: Limits,
    /// Analyze independent call-graph components on the rayon pool.
    pub parallel: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            mode: Mode::Inter,
            limits: Limits::default(),
            parallel: true,
        }
    }
}

/// Summary flags.
pub mod flags {
    pub const TRUNCATED: &str = "truncated";
    pub const CLAUSE_LIMIT_HIT: &str = "clause-limit-hit";
    pub const UNCONDITIONAL: &str = "unconditional";
    pub const INFEASIBLE: &str = "infeasible";
    pub const IMPRECISE: &str = "imprecise";
    pub const RECURSIVE_APPROX: &str = "recursive-approx";
    pub const UNREACHABLE: &str = "unreachable";
}

/// Declaring method and statement index of a throw.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Origin {
    pub method: String,
    pub stmt: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExceptionSummary {
    #[serde(rename = "type")]
    pub exception_type: String,
    pub message_pattern: String,
    /// Unrefined control-dependence conditions per path at the origin.
    pub condition: BTreeSet<Clause>,
    pub precondition: Precondition,
    pub key_precondition: Precondition,
    pub origin: Origin,
    /// Methods from the API down to the origin; empty for a local throw.
    pub call_chain: Vec<String>,
    pub flags: BTreeSet<String>,
    /// Pre-paths whose constraints were contradictory.
    pub dropped_paths: usize,
}

impl ExceptionSummary {
    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.contains(flag)
    }

    /// Order used inside reports.
    pub fn sort_key(&self) -> impl Ord + '_ {
        (
            &self.origin,
            &self.call_chain,
            &self.exception_type,
            &self.message_pattern,
            &self.precondition,
            &self.key_precondition,
            &self.flags,
            &self.condition,
            self.dropped_paths,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiSummaries {
    pub id: MethodId,
    pub summaries: Vec<ExceptionSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub version: String,
    pub mode: Mode,
    pub limits: Limits,
    pub apis: Vec<ApiSummaries>,
}

impl SummaryReport {
    pub fn api(&self, id: &MethodId) -> Option<&ApiSummaries> {
        self.apis.iter().find(|a| &a.id == id)
    }

    /// Human-readable listing, one block per API.
    pub fn render_text(&self) -> String {
        let mut out = format!("version: {}\nmode: {}\n", self.version, self.mode);
        for api in &self.apis {
            let _ = write!(out, "\n{}\n", api.id);
            if api.summaries.is_empty() {
                out.push_str("  no exceptions\n");
            }
            for s in &api.summaries {
                let _ = writeln!(
                    out,
                    "  {} at {}#{}",
                    s.exception_type, s.origin.method, s.origin.stmt
                );
                if s.message_pattern.is_empty() {
                    out.push_str("    message:\n");
                } else {
                    let _ = writeln!(out, "    message: {}", s.message_pattern);
                }
                let _ = writeln!(out, "    precondition: {}", s.precondition.render());
                let _ = writeln!(out, "    key: {}", s.key_precondition.render());
                if !s.call_chain.is_empty() {
                    let _ = writeln!(out, "    chain: {}", s.call_chain.join(" > "));
                }
                if !s.flags.is_empty() {
                    let flags: Vec<&str> = s.flags.iter().map(String::as_str).collect();
                    let _ = writeln!(out, "    flags: {}", flags.join(", "));
                }
            }
        }
        out
    }
}
