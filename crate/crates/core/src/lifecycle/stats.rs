use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Aspect, LifecycleModel, LifecycleReport};
use crate::summary::{Mode, Origin};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statistics {
    pub mode: Mode,
    pub versions: usize,
    pub apis: usize,
    /// Exception field changes by kind.
    pub modifications: BTreeMap<Aspect, usize>,
    pub apis_added: usize,
    pub apis_removed: usize,
    /// Exceptions that appeared in an API that already existed.
    pub exceptions_added: usize,
    /// Exceptions that disappeared while their API remained.
    pub exceptions_removed: usize,
    /// APIs with at least one exception change after their introduction.
    pub apis_with_exception_changes: usize,
    pub api_change_fraction: f64,
    /// Exception lineages over all APIs.
    pub exception_instances: usize,
    /// Lineages after merging those that start at the same throw site.
    pub independent_exceptions: usize,
    /// Instances that only repeat an exception already counted.
    pub propagated_duplicates: usize,
}

struct Counts {
    added: usize,
    removed: usize,
    modified: usize,
}

fn api_counts(m: &LifecycleModel) -> Counts {
    let starts: BTreeSet<&str> = m.intervals.iter().map(|i| i.introduced.as_str()).collect();
    let ends: BTreeSet<&str> = m
        .intervals
        .iter()
        .filter_map(|i| i.removed.as_deref())
        .collect();
    Counts {
        added: m
            .exceptions
            .iter()
            .filter(|e| !starts.contains(e.introduced.as_str()))
            .count(),
        removed: m
            .exceptions
            .iter()
            .filter(|e| e.removed.as_deref().is_some_and(|v| !ends.contains(v)))
            .count(),
        modified: m.exceptions.iter().map(|e| e.events.len()).sum(),
    }
}

pub fn summarize_statistics(report: &LifecycleReport) -> Statistics {
    let first = report.versions.first().map(String::as_str);
    let mut modifications: BTreeMap<Aspect, usize> =
        [Aspect::Type, Aspect::Message, Aspect::Precondition]
            .into_iter()
            .map(|a| (a, 0))
            .collect();
    let mut s = Statistics {
        mode: report.mode,
        versions: report.versions.len(),
        apis: report.apis.len(),
        modifications: BTreeMap::new(),
        apis_added: 0,
        apis_removed: 0,
        exceptions_added: 0,
        exceptions_removed: 0,
        apis_with_exception_changes: 0,
        api_change_fraction: 0.0,
        exception_instances: 0,
        independent_exceptions: 0,
        propagated_duplicates: 0,
    };
    let mut origins: BTreeSet<&Origin> = BTreeSet::new();
    for m in &report.apis {
        s.apis_added += m
            .intervals
            .iter()
            .filter(|i| Some(i.introduced.as_str()) != first)
            .count();
        s.apis_removed += m.intervals.iter().filter(|i| i.removed.is_some()).count();
        let c = api_counts(m);
        s.exceptions_added += c.added;
        s.exceptions_removed += c.removed;
        if c.added + c.removed + c.modified > 0 {
            s.apis_with_exception_changes += 1;
        }
        for e in &m.exceptions {
            for ev in &e.events {
                *modifications.entry(ev.kind).or_default() += 1;
            }
            origins.insert(&e.origin);
        }
        s.exception_instances += m.exceptions.len();
    }
    s.modifications = modifications;
    s.independent_exceptions = origins.len();
    s.propagated_duplicates = s.exception_instances - s.independent_exceptions;
    if s.apis > 0 {
        s.api_change_fraction = s.apis_with_exception_changes as f64 / s.apis as f64;
    }
    s
}
