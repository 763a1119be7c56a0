use std::collections::BTreeSet;

use exlife_core::matching::{fixpoint_match, normalize_summary, Rule};
use exlife_core::summary::{ExceptionSummary, Literal, Origin, Precondition};
use rand::seq::SliceRandom;
use rand::Rng;

const ATOMS: [&str; 4] = [
    "parameter0 == null",
    "parameter1.exists()",
    "parameter0 > 3",
    "parameter1.isFile()",
];
const TYPES: [&str; 3] = [
    "IOException",
    "NullPointerException",
    "IllegalStateException",
];
const MESSAGES: [&str; 3] = ["a", "b .*", ""];

fn random_precondition(rng: &mut impl Rng) -> Precondition {
    let clauses = rng.gen_range(0..3);
    Precondition::from_clauses((0..clauses).map(|_| {
        (0..rng.gen_range(0..3))
            .map(|_| Literal::new(*ATOMS.choose(rng).unwrap(), rng.gen_bool(0.5)))
            .collect::<BTreeSet<_>>()
    }))
}

/// Summaries drawn from small pools so that fields often coincide.
pub fn random_summary(rng: &mut impl Rng) -> ExceptionSummary {
    let pre = random_precondition(rng);
    ExceptionSummary {
        exception_type: TYPES.choose(rng).unwrap().to_string(),
        message_pattern: MESSAGES.choose(rng).unwrap().to_string(),
        condition: pre.clauses.clone(),
        precondition: pre,
        key_precondition: random_precondition(rng),
        origin: Origin {
            method: "A::f()".to_string(),
            stmt: rng.gen_range(0..6),
        },
        call_chain: Vec::new(),
        flags: BTreeSet::new(),
        dropped_paths: 0,
    }
}

pub fn random_queue(rng: &mut impl Rng, max: usize) -> Vec<ExceptionSummary> {
    let mut q: Vec<_> = (0..rng.gen_range(0..=max))
        .map(|_| random_summary(rng))
        .collect();
    q.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    q
}

fn ensure(ok: bool, what: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

/// Partition, rule soundness, round bound, symmetry and idempotence of
/// one matching problem.
pub fn check_matching(old: &[ExceptionSummary], new: &[ExceptionSummary]) -> Result<(), String> {
    let out = fixpoint_match(old, new);

    let olds: Vec<usize> = out
        .pairs
        .iter()
        .map(|p| p.old)
        .chain(out.removed.iter().copied())
        .collect();
    let news: Vec<usize> = out
        .pairs
        .iter()
        .map(|p| p.new)
        .chain(out.added.iter().copied())
        .collect();
    let cover = |idx: &[usize], n: usize| {
        idx.len() == n && idx.iter().copied().collect::<BTreeSet<_>>() == (0..n).collect()
    };
    ensure(cover(&olds, old.len()), "old side is not partitioned")?;
    ensure(cover(&news, new.len()), "new side is not partitioned")?;

    for p in &out.pairs {
        let (a, b) = (
            normalize_summary(&old[p.old]),
            normalize_summary(&new[p.new]),
        );
        ensure(
            p.rule == Rule::between(&a, &b),
            "rule disagrees with field vector",
        )?;
        ensure(p.rule.is_match(), "pair under a non-matching rule")?;
        if p.rule == Rule::R5 {
            ensure(
                a.key_precondition == b.key_precondition,
                "R5 pair without shared key",
            )?;
        }
    }
    ensure(
        out.rounds <= old.len().min(new.len()) + 1,
        "too many rounds",
    )?;

    let back = fixpoint_match(new, old);
    let forward: BTreeSet<_> = out.pairs.iter().map(|p| (p.old, p.new, p.rule)).collect();
    let mirrored: BTreeSet<_> = back.pairs.iter().map(|p| (p.new, p.old, p.rule)).collect();
    ensure(forward == mirrored, "pairs change under swap")?;
    ensure(
        back.added == out.removed && back.removed == out.added,
        "added/removed not swapped",
    )?;

    for side in [old, new] {
        let same = fixpoint_match(side, side);
        ensure(
            same.pairs.len() == side.len() && same.pairs.iter().all(|p| p.rule == Rule::R1),
            "queue does not match itself exactly",
        )?;
    }
    Ok(())
}
