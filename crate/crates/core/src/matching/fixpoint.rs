//! Multi-round matching of two exception queues of one API.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::normalize::{normalize_summary, SummaryKey};
use crate::summary::ExceptionSummary;

/// Matching rules by which fields agree: type, message, precondition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
}

impl Rule {
    /// The rule whose agreement vector is `(type, message, precondition)`.
    pub fn from_agreement(type_eq: bool, message_eq: bool, pre_eq: bool) -> Rule {
        match (type_eq, message_eq, pre_eq) {
            (true, true, true) => Rule::R1,
            (false, true, true) => Rule::R2,
            (true, false, true) => Rule::R3,
            (true, true, false) => Rule::R4,
            (true, false, false) => Rule::R5,
            (false, true, false) => Rule::R6,
            (false, false, true) => Rule::R7,
            (false, false, false) => Rule::R8,
        }
    }

    pub fn agreement(self) -> (bool, bool, bool) {
        match self {
            Rule::R1 => (true, true, true),
            Rule::R2 => (false, true, true),
            Rule::R3 => (true, false, true),
            Rule::R4 => (true, true, false),
            Rule::R5 => (true, false, false),
            Rule::R6 => (false, true, false),
            Rule::R7 => (false, false, true),
            Rule::R8 => (false, false, false),
        }
    }

    pub fn between(a: &SummaryKey, b: &SummaryKey) -> Rule {
        Rule::from_agreement(
            a.exception_type == b.exception_type,
            a.message_pattern == b.message_pattern,
            a.precondition == b.precondition,
        )
    }

    /// Whether two summaries related by this rule denote one exception.
    pub fn is_match(self) -> bool {
        matches!(self, Rule::R1 | Rule::R2 | Rule::R3 | Rule::R4 | Rule::R5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pair {
    pub old: usize,
    pub new: usize,
    pub rule: Rule,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchOutcome {
    /// Sorted by old index.
    pub pairs: Vec<Pair>,
    /// Unmatched old summaries, ascending.
    pub removed: Vec<usize>,
    /// Unmatched new summaries, ascending.
    pub added: Vec<usize>,
    /// Rounds of the single-field and key-precondition steps, including the
    /// final round that changed nothing.
    pub rounds: usize,
}

/// Field comparisons in filter order.
const FILTERS: [fn(&SummaryKey, &SummaryKey) -> bool; 3] = [
    |a, b| a.exception_type == b.exception_type,
    |a, b| a.message_pattern == b.message_pattern,
    |a, b| a.precondition == b.precondition,
];

/// Runs the type, message and precondition filters in turn. A filter that
/// keeps nothing passes its whole input on.
fn filter_chain(e: &SummaryKey, keys: &[SummaryKey], pool: &BTreeSet<usize>) -> Vec<usize> {
    let mut cands: Vec<usize> = pool.iter().copied().collect();
    for same in FILTERS {
        let kept: Vec<usize> = cands
            .iter()
            .copied()
            .filter(|&c| same(&keys[c], e))
            .collect();
        if !kept.is_empty() {
            cands = kept;
        }
    }
    cands
}

fn key_candidates(e: &SummaryKey, keys: &[SummaryKey], pool: &BTreeSet<usize>) -> Vec<usize> {
    pool.iter()
        .copied()
        .filter(|&c| {
            keys[c].exception_type == e.exception_type
                && keys[c].key_precondition == e.key_precondition
        })
        .collect()
}

/// Pairs `o` with `n` when each is the other's only candidate.
fn mutual(
    old_keys: &[SummaryKey],
    new_keys: &[SummaryKey],
    olds: &BTreeSet<usize>,
    news: &BTreeSet<usize>,
    candidates: impl Fn(&SummaryKey, &[SummaryKey], &BTreeSet<usize>) -> Vec<usize>,
    accept: impl Fn(Rule) -> bool,
) -> Vec<Pair> {
    let mut out = Vec::new();
    for &o in olds {
        if let [n] = candidates(&old_keys[o], new_keys, news)[..] {
            if candidates(&new_keys[n], old_keys, olds)[..] == [o] {
                let rule = Rule::between(&old_keys[o], &new_keys[n]);
                if accept(rule) {
                    out.push(Pair {
                        old: o,
                        new: n,
                        rule,
                    });
                }
            }
        }
    }
    out
}

/// Matches the summaries of one API across two versions.
///
/// 1. Exact matches (R1) pair up as a multiset.
/// 2. Each remaining summary runs the filter chain; a mutual unique
///    candidate differing in one field pairs under R2, R3 or R4.
/// 3. Summaries agreeing in type and key precondition, uniquely on both
///    sides, pair under the rule their fields give.
/// 4. Steps 2 and 3 repeat until a round pairs nothing.
/// 5. The rest is removed (old side) or added (new side).
pub fn fixpoint_match(old: &[ExceptionSummary], new: &[ExceptionSummary]) -> MatchOutcome {
    let old_keys: Vec<SummaryKey> = old.iter().map(normalize_summary).collect();
    let new_keys: Vec<SummaryKey> = new.iter().map(normalize_summary).collect();
    let mut pairs = Vec::new();

    let order = |keys: &[SummaryKey], items: &[ExceptionSummary]| {
        let mut idx: Vec<usize> = (0..keys.len()).collect();
        idx.sort_by(|&a, &b| {
            keys[a]
                .triple()
                .cmp(&keys[b].triple())
                .then_with(|| items[a].sort_key().cmp(&items[b].sort_key()))
        });
        idx
    };
    let old_order = order(&old_keys, old);
    let new_order = order(&new_keys, new);
    let mut olds: BTreeSet<usize> = (0..old.len()).collect();
    let mut news: BTreeSet<usize> = (0..new.len()).collect();
    let (mut i, mut j) = (0, 0);
    while i < old_order.len() && j < new_order.len() {
        let (o, n) = (old_order[i], new_order[j]);
        match old_keys[o].triple().cmp(&new_keys[n].triple()) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                pairs.push(Pair {
                    old: o,
                    new: n,
                    rule: Rule::R1,
                });
                olds.remove(&o);
                news.remove(&n);
                i += 1;
                j += 1;
            }
        }
    }

    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut found = mutual(&old_keys, &new_keys, &olds, &news, filter_chain, |r| {
            matches!(r, Rule::R2 | Rule::R3 | Rule::R4)
        });
        for p in &found {
            olds.remove(&p.old);
            news.remove(&p.new);
        }
        let by_key = mutual(
            &old_keys,
            &new_keys,
            &olds,
            &news,
            key_candidates,
            Rule::is_match,
        );
        for p in &by_key {
            olds.remove(&p.old);
            news.remove(&p.new);
        }
        found.extend(by_key);
        if found.is_empty() {
            break;
        }
        pairs.extend(found);
    }

    pairs.sort();
    MatchOutcome {
        pairs,
        removed: olds.into_iter().collect(),
        added: news.into_iter().collect(),
        rounds,
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::summary::{Literal, Origin, Precondition};

    fn pre(atoms: &[&str]) -> Precondition {
        Precondition::from_clauses([atoms.iter().map(|a| Literal::new(*a, true)).collect()])
    }

    fn s(t: &str, m: &str, p: &[&str], key: &[&str]) -> ExceptionSummary {
        ExceptionSummary {
            exception_type: t.into(),
            message_pattern: m.into(),
            condition: BTreeSet::new(),
            precondition: pre(p),
            key_precondition: pre(key),
            origin: Origin {
                method: "A::f()".into(),
                stmt: 0,
            },
            call_chain: Vec::new(),
            flags: BTreeSet::new(),
            dropped_paths: 0,
        }
    }

    fn rules(o: &MatchOutcome) -> Vec<Rule> {
        o.pairs.iter().map(|p| p.rule).collect()
    }

    #[test]
    fn identical_queues_pair_exactly() {
        let q = [s("E", "a", &["x"], &["x"]), s("E", "a", &["x"], &["x"])];
        let o = fixpoint_match(&q, &q);
        assert_eq!(rules(&o), [Rule::R1, Rule::R1]);
        assert_eq!(o.rounds, 1);
    }

    #[test]
    fn single_field_changes_pair() {
        let old = [s("E", "a", &["x"], &["x"]), s("F", "b", &["y"], &["y"])];
        let new = [
            s("E", "changed", &["x"], &["x"]),
            s("F", "b", &["y", "z"], &["z"]),
        ];
        let o = fixpoint_match(&old, &new);
        assert_eq!(rules(&o), [Rule::R3, Rule::R4]);
        assert!(o.removed.is_empty() && o.added.is_empty());
    }

    #[test]
    fn two_field_change_needs_the_key() {
        let old = [s("E", "a", &["x", "k"], &["k"])];
        let same_key = [s("E", "b", &["y", "k"], &["k"])];
        let other_key = [s("E", "b", &["y", "k"], &["y"])];
        assert_eq!(rules(&fixpoint_match(&old, &same_key)), [Rule::R5]);
        let o = fixpoint_match(&old, &other_key);
        assert!(o.pairs.is_empty());
        assert_eq!((o.removed.len(), o.added.len()), (1, 1));
    }

    #[test]
    fn ambiguous_candidates_stay_unpaired() {
        let old = [s("E", "a", &["x"], &["x"])];
        let new = [s("E", "b", &["x"], &["x"]), s("E", "c", &["x"], &["x"])];
        let o = fixpoint_match(&old, &new);
        assert!(o.pairs.is_empty());
        assert_eq!(o.added, [0, 1]);
    }

    #[test]
    fn a_key_pairing_unblocks_the_next_round() {
        // both old summaries see both new ones through the filters until the
        // key precondition pairs the first
        let old = [s("E", "a", &["p"], &["k"]), s("E", "b", &["q"], &["q"])];
        let new = [s("E", "c", &["q"], &["k"]), s("E", "d", &["q"], &["j"])];
        let o = fixpoint_match(&old, &new);
        assert_eq!(
            o.pairs,
            [
                Pair {
                    old: 0,
                    new: 0,
                    rule: Rule::R5
                },
                Pair {
                    old: 1,
                    new: 1,
                    rule: Rule::R3
                }
            ]
        );
        assert_eq!(o.rounds, 3);
    }
}
