//! Matching exception summaries of same-signature APIs across two versions
//! and classifying the differences.

mod fixpoint;
mod normalize;

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::exir::MethodId;
use crate::summary::{ApiSummaries, ExceptionSummary, Mode, Origin, SummaryReport};

pub use fixpoint::{fixpoint_match, MatchOutcome, Pair, Rule};
pub use normalize::{canonical_clauses, normalize_summary, SummaryKey};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatchError {
    #[error("version {version}: API {api} appears more than once")]
    DuplicateApi { version: String, api: String },
    #[error("cannot compare a {old} report with a {new} report")]
    ModeMismatch { old: Mode, new: Mode },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChangeKind {
    ApiAdded,
    ApiRemoved,
    ExceptionAdded,
    ExceptionRemoved,
    ExceptionTypeChanged,
    ExceptionMessageChanged,
    ExceptionPreconditionChanged,
}

impl ChangeKind {
    pub fn name(self) -> &'static str {
        match self {
            ChangeKind::ApiAdded => "api-added",
            ChangeKind::ApiRemoved => "api-removed",
            ChangeKind::ExceptionAdded => "exception-added",
            ChangeKind::ExceptionRemoved => "exception-removed",
            ChangeKind::ExceptionTypeChanged => "exception-type-changed",
            ChangeKind::ExceptionMessageChanged => "exception-message-changed",
            ChangeKind::ExceptionPreconditionChanged => "exception-precondition-changed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeEvent {
    pub kind: ChangeKind,
    pub api: MethodId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<Rule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub old: Option<ExceptionSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub new: Option<ExceptionSummary>,
}

impl ChangeEvent {
    fn origin(&self) -> Option<&Origin> {
        self.old.as_ref().or(self.new.as_ref()).map(|s| &s.origin)
    }

    fn sort_key(&self) -> impl Ord + '_ {
        (
            &self.api,
            self.origin(),
            self.kind,
            self.old.as_ref().map(|s| s.sort_key()),
            self.new.as_ref().map(|s| s.sort_key()),
        )
    }
}

/// A matched pair, by summary position within the API in each report.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatchRecord {
    pub api: MethodId,
    pub old: usize,
    pub new: usize,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeReport {
    pub old_version: String,
    pub new_version: String,
    pub mode: Mode,
    pub events: Vec<ChangeEvent>,
    pub matches: Vec<MatchRecord>,
}

fn describe(s: &ExceptionSummary) -> String {
    format!(
        "{} at {}#{} | {} | {}",
        s.exception_type,
        s.origin.method,
        s.origin.stmt,
        s.message_pattern,
        s.precondition.render()
    )
}

impl ChangeReport {
    /// Human-readable listing, one block per event.
    pub fn render_text(&self) -> String {
        let mut out = format!(
            "old: {}\nnew: {}\nmode: {}\nevents: {}\n",
            self.old_version,
            self.new_version,
            self.mode,
            self.events.len()
        );
        for e in &self.events {
            let rule = e.rule.map(|r| format!(" ({r:?})")).unwrap_or_default();
            let _ = write!(out, "\n{} {}{rule}\n", e.kind.name(), e.api);
            if let Some(s) = &e.old {
                let _ = writeln!(out, "  old: {}", describe(s));
            }
            if let Some(s) = &e.new {
                let _ = writeln!(out, "  new: {}", describe(s));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiMatching<'a> {
    pub paired: Vec<(&'a ApiSummaries, &'a ApiSummaries)>,
    pub removed: Vec<&'a MethodId>,
    pub added: Vec<&'a MethodId>,
}

fn index(report: &SummaryReport) -> Result<BTreeMap<&MethodId, &ApiSummaries>, MatchError> {
    let mut map = BTreeMap::new();
    for api in &report.apis {
        if map.insert(&api.id, api).is_some() {
            return Err(MatchError::DuplicateApi {
                version: report.version.clone(),
                api: api.id.to_string(),
            });
        }
    }
    Ok(map)
}

/// Pairs APIs by exact signature.
pub fn match_apis<'a>(
    old: &'a SummaryReport,
    new: &'a SummaryReport,
) -> Result<ApiMatching<'a>, MatchError> {
    let old_map = index(old)?;
    let new_map = index(new)?;
    let mut out = ApiMatching {
        paired: Vec::new(),
        removed: Vec::new(),
        added: Vec::new(),
    };
    for (id, api) in &old_map {
        match new_map.get(id) {
            Some(n) => out.paired.push((api, n)),
            None => out.removed.push(id),
        }
    }
    out.added = new_map
        .keys()
        .filter(|id| !old_map.contains_key(*id))
        .copied()
        .collect();
    Ok(out)
}

/// Change events of one API from its match outcome. R1 pairs produce none;
/// an R5 pair produces a message change and a precondition change.
pub fn classify_changes(
    api: &MethodId,
    old: &[ExceptionSummary],
    new: &[ExceptionSummary],
    outcome: &MatchOutcome,
) -> Vec<ChangeEvent> {
    let event = |kind, rule, o: Option<usize>, n: Option<usize>| ChangeEvent {
        kind,
        api: api.clone(),
        rule,
        old: o.map(|i| old[i].clone()),
        new: n.map(|i| new[i].clone()),
    };
    let mut out = Vec::new();
    for p in &outcome.pairs {
        let (type_eq, message_eq, pre_eq) = p.rule.agreement();
        for (same, kind) in [
            (type_eq, ChangeKind::ExceptionTypeChanged),
            (message_eq, ChangeKind::ExceptionMessageChanged),
            (pre_eq, ChangeKind::ExceptionPreconditionChanged),
        ] {
            if !same {
                out.push(event(kind, Some(p.rule), Some(p.old), Some(p.new)));
            }
        }
    }
    for &o in &outcome.removed {
        out.push(event(ChangeKind::ExceptionRemoved, None, Some(o), None));
    }
    for &n in &outcome.added {
        out.push(event(ChangeKind::ExceptionAdded, None, None, Some(n)));
    }
    out
}

fn sort_events(events: &mut [ChangeEvent]) {
    events.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

/// Compares two summary reports of the same analysis mode.
pub fn diff_reports(old: &SummaryReport, new: &SummaryReport) -> Result<ChangeReport, MatchError> {
    if old.mode != new.mode {
        return Err(MatchError::ModeMismatch {
            old: old.mode,
            new: new.mode,
        });
    }
    let apis = match_apis(old, new)?;
    let mut events = Vec::new();
    let mut matches = Vec::new();
    for id in &apis.removed {
        events.push(ChangeEvent {
            kind: ChangeKind::ApiRemoved,
            api: (*id).clone(),
            rule: None,
            old: None,
            new: None,
        });
    }
    for id in &apis.added {
        events.push(ChangeEvent {
            kind: ChangeKind::ApiAdded,
            api: (*id).clone(),
            rule: None,
            old: None,
            new: None,
        });
    }
    for (o, n) in &apis.paired {
        let outcome = fixpoint_match(&o.summaries, &n.summaries);
        events.extend(classify_changes(
            &o.id,
            &o.summaries,
            &n.summaries,
            &outcome,
        ));
        matches.extend(outcome.pairs.iter().map(|p| MatchRecord {
            api: o.id.clone(),
            old: p.old,
            new: p.new,
            rule: p.rule,
        }));
    }
    sort_events(&mut events);
    matches.sort();
    Ok(ChangeReport {
        old_version: old.version.clone(),
        new_version: new.version.clone(),
        mode: old.mode,
        events,
        matches,
    })
}
