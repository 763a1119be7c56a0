//! Lifecycle models: when each API existed and how each of its exceptions
//! changed across an ordered sequence of versions.

mod pretty;
mod stats;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::exir::MethodId;
use crate::matching::{canonical_clauses, ChangeKind, ChangeReport, Rule};
use crate::summary::{Clause, ExceptionSummary, Mode, Origin, SummaryReport};

pub use pretty::render_text;
pub use stats::{summarize_statistics, Statistics};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LifecycleError {
    #[error("no versions given")]
    Empty,
    #[error("expected {expected} change report(s) for {versions} version(s), got {got}")]
    DiffCount {
        expected: usize,
        versions: usize,
        got: usize,
    },
    #[error(
        "change report {index} compares {old} -> {new}, expected {expected_old} -> {expected_new}"
    )]
    NonConsecutive {
        index: usize,
        old: String,
        new: String,
        expected_old: String,
        expected_new: String,
    },
    #[error("version {version} was analyzed in a different mode")]
    ModeMismatch { version: String },
    #[error("change report {old} -> {new}: {message}")]
    Inconsistent {
        old: String,
        new: String,
        message: String,
    },
}

/// `[introduced, removed)`; `removed: None` is open-ended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub introduced: String,
    pub removed: Option<String>,
}

/// Which summary field a lifecycle event changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aspect {
    Type,
    Message,
    Precondition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Fragment {
    Text(String),
    Precondition(BTreeSet<Clause>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LifecycleEvent {
    pub version: String,
    pub kind: Aspect,
    pub rule: Rule,
    pub old: Fragment,
    pub new: Fragment,
}

/// The compared fields of a summary, in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triple {
    #[serde(rename = "type")]
    pub exception_type: String,
    pub message_pattern: String,
    pub precondition: BTreeSet<Clause>,
}

impl Triple {
    pub fn of(s: &ExceptionSummary) -> Triple {
        Triple {
            exception_type: s.exception_type.clone(),
            message_pattern: s.message_pattern.clone(),
            precondition: canonical_clauses(&s.precondition),
        }
    }

    fn fragment(&self, aspect: Aspect) -> Fragment {
        match aspect {
            Aspect::Type => Fragment::Text(self.exception_type.clone()),
            Aspect::Message => Fragment::Text(self.message_pattern.clone()),
            Aspect::Precondition => Fragment::Precondition(self.precondition.clone()),
        }
    }

    /// Applies one event; `None` if the event does not start from `self`.
    pub fn apply(&self, e: &LifecycleEvent) -> Option<Triple> {
        if self.fragment(e.kind) != e.old {
            return None;
        }
        let mut next = self.clone();
        match (e.kind, &e.new) {
            (Aspect::Type, Fragment::Text(t)) => next.exception_type = t.clone(),
            (Aspect::Message, Fragment::Text(m)) => next.message_pattern = m.clone(),
            (Aspect::Precondition, Fragment::Precondition(p)) => next.precondition = p.clone(),
            _ => return None,
        }
        Some(next)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionLifecycle {
    pub lineage_id: String,
    pub introduced: String,
    pub removed: Option<String>,
    /// Throw site when the lineage started.
    pub origin: Origin,
    pub call_chain: Vec<String>,
    /// Summary fields at introduction.
    pub initial: Triple,
    pub events: Vec<LifecycleEvent>,
}

impl ExceptionLifecycle {
    /// Fields after every event, replayed from `initial`.
    pub fn replay(&self) -> Option<Triple> {
        self.events
            .iter()
            .try_fold(self.initial.clone(), |t, e| t.apply(e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LifecycleModel {
    pub signature: MethodId,
    pub intervals: Vec<Interval>,
    pub exceptions: Vec<ExceptionLifecycle>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LifecycleReport {
    pub mode: Mode,
    pub versions: Vec<String>,
    pub apis: Vec<LifecycleModel>,
}

fn lineage_hash(api: &MethodId, version: &str, s: &ExceptionSummary, ordinal: usize) -> String {
    let mut h = Sha256::new();
    for part in [
        api.to_string(),
        version.to_string(),
        s.origin.method.clone(),
        s.origin.stmt.to_string(),
        s.call_chain.join(" > "),
        ordinal.to_string(),
    ] {
        h.update(part.as_bytes());
        h.update([0u8]);
    }
    hex::encode(h.finalize())[..16].to_string()
}

struct Builder<'a> {
    reports: &'a [SummaryReport],
    models: BTreeMap<MethodId, LifecycleModel>,
    used_ids: BTreeSet<String>,
}

impl Builder<'_> {
    fn model(&mut self, api: &MethodId) -> &mut LifecycleModel {
        self.models
            .entry(api.clone())
            .or_insert_with(|| LifecycleModel {
                signature: api.clone(),
                intervals: Vec::new(),
                exceptions: Vec::new(),
            })
    }

    /// Starts a lineage and returns its position in the API's model.
    fn start(&mut self, api: &MethodId, version: usize, s: &ExceptionSummary) -> usize {
        let label = &self.reports[version].version;
        let mut ordinal = 0;
        let id = loop {
            let id = lineage_hash(api, label, s, ordinal);
            if self.used_ids.insert(id.clone()) {
                break id;
            }
            ordinal += 1;
        };
        let lineage = ExceptionLifecycle {
            lineage_id: id,
            introduced: label.clone(),
            removed: None,
            origin: s.origin.clone(),
            call_chain: s.call_chain.clone(),
            initial: Triple::of(s),
            events: Vec::new(),
        };
        let m = self.model(api);
        m.exceptions.push(lineage);
        m.exceptions.len() - 1
    }
}

fn api_summaries<'a>(r: &'a SummaryReport, id: &MethodId) -> &'a [ExceptionSummary] {
    r.api(id).map(|a| a.summaries.as_slice()).unwrap_or(&[])
}

/// Threads matched summaries into lineages across `reports`, where
/// `diffs[i]` compares `reports[i]` with `reports[i + 1]`.
pub fn build_lifecycle(
    reports: &[SummaryReport],
    diffs: &[ChangeReport],
) -> Result<LifecycleReport, LifecycleError> {
    let first = reports.first().ok_or(LifecycleError::Empty)?;
    if diffs.len() + 1 != reports.len() {
        return Err(LifecycleError::DiffCount {
            expected: reports.len() - 1,
            versions: reports.len(),
            got: diffs.len(),
        });
    }
    for r in reports {
        if r.mode != first.mode {
            return Err(LifecycleError::ModeMismatch {
                version: r.version.clone(),
            });
        }
    }
    for (i, d) in diffs.iter().enumerate() {
        let (a, b) = (&reports[i].version, &reports[i + 1].version);
        if &d.old_version != a || &d.new_version != b || d.mode != first.mode {
            return Err(LifecycleError::NonConsecutive {
                index: i,
                old: d.old_version.clone(),
                new: d.new_version.clone(),
                expected_old: a.clone(),
                expected_new: b.clone(),
            });
        }
    }

    let mut b = Builder {
        reports,
        models: BTreeMap::new(),
        used_ids: BTreeSet::new(),
    };
    // live lineages: (api, summary index in the current version) -> lineage
    let mut live: BTreeMap<(MethodId, usize), usize> = BTreeMap::new();
    for api in &first.apis {
        b.model(&api.id).intervals.push(Interval {
            introduced: first.version.clone(),
            removed: None,
        });
        for (i, s) in api.summaries.iter().enumerate() {
            let l = b.start(&api.id, 0, s);
            live.insert((api.id.clone(), i), l);
        }
    }

    for (step, diff) in diffs.iter().enumerate() {
        let old = &reports[step];
        let new = &reports[step + 1];
        let version = &new.version;
        let bad = |message: String| LifecycleError::Inconsistent {
            old: old.version.clone(),
            new: new.version.clone(),
            message,
        };
        let mut next: BTreeMap<(MethodId, usize), usize> = BTreeMap::new();

        for e in &diff.events {
            match e.kind {
                ChangeKind::ApiRemoved => {
                    let m = b.model(&e.api);
                    match m.intervals.last_mut() {
                        Some(iv) if iv.removed.is_none() => iv.removed = Some(version.clone()),
                        _ => return Err(bad(format!("{} removed but not present", e.api))),
                    }
                }
                ChangeKind::ApiAdded => {
                    let m = b.model(&e.api);
                    if m.intervals.last().is_some_and(|iv| iv.removed.is_none()) {
                        return Err(bad(format!("{} added but already present", e.api)));
                    }
                    m.intervals.push(Interval {
                        introduced: version.clone(),
                        removed: None,
                    });
                }
                _ => {}
            }
        }

        let mut by_api: BTreeMap<&MethodId, Vec<(usize, usize, Rule)>> = BTreeMap::new();
        for m in &diff.matches {
            by_api
                .entry(&m.api)
                .or_default()
                .push((m.old, m.new, m.rule));
        }
        for api in &new.apis {
            let old_s = api_summaries(old, &api.id);
            let new_s = &api.summaries;
            let mut matched_new = BTreeSet::new();
            for &(o, n, rule) in by_api.get(&api.id).map(Vec::as_slice).unwrap_or(&[]) {
                if o >= old_s.len() || n >= new_s.len() || !matched_new.insert(n) {
                    return Err(bad(format!("bad match {o} -> {n} in {}", api.id)));
                }
                let l = live
                    .remove(&(api.id.clone(), o))
                    .ok_or_else(|| bad(format!("summary {o} of {} matched twice", api.id)))?;
                let (before, after) = (Triple::of(&old_s[o]), Triple::of(&new_s[n]));
                let (type_eq, message_eq, pre_eq) = rule.agreement();
                let lineage = &mut b.model(&api.id).exceptions[l];
                for (aspect, same) in [
                    (Aspect::Type, type_eq),
                    (Aspect::Message, message_eq),
                    (Aspect::Precondition, pre_eq),
                ] {
                    if !same {
                        lineage.events.push(LifecycleEvent {
                            version: version.clone(),
                            kind: aspect,
                            rule,
                            old: before.fragment(aspect),
                            new: after.fragment(aspect),
                        });
                    }
                }
                next.insert((api.id.clone(), n), l);
            }
            for (n, s) in new_s.iter().enumerate() {
                if !matched_new.contains(&n) {
                    let l = b.start(&api.id, step + 1, s);
                    next.insert((api.id.clone(), n), l);
                }
            }
        }
        // whatever is still live did not survive into `new`
        for ((api, _), l) in live {
            b.model(&api).exceptions[l].removed = Some(version.clone());
        }
        live = next;
    }

    Ok(LifecycleReport {
        mode: first.mode,
        versions: reports.iter().map(|r| r.version.clone()).collect(),
        apis: b.models.into_values().collect(),
    })
}
