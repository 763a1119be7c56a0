use std::collections::BTreeSet;

use crate::summary::{
    conjunction, normalize_literal, parse_expr, Clause, ExceptionSummary, Normalized, Precondition,
};

/// The fields two summaries are compared on.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SummaryKey {
    pub exception_type: String,
    pub message_pattern: String,
    pub precondition: BTreeSet<Clause>,
    pub key_precondition: BTreeSet<Clause>,
}

impl SummaryKey {
    pub fn triple(&self) -> (&str, &str, &BTreeSet<Clause>) {
        (
            &self.exception_type,
            &self.message_pattern,
            &self.precondition,
        )
    }
}

/// Re-canonicalizes every literal (negations pushed into polarity,
/// relational operators reduced to `==`, `<`, `>`) and the clause set.
/// Literals whose atom does not parse are kept verbatim.
pub fn canonical_clauses(p: &Precondition) -> BTreeSet<Clause> {
    let clauses = p.clauses.iter().filter_map(|c| {
        let lits: Vec<Normalized> = c
            .iter()
            .map(|l| match parse_expr(&l.atom) {
                Ok(e) => normalize_literal(e, l.polarity),
                Err(_) => Normalized::Literal {
                    atom: l.atom.clone(),
                    polarity: l.polarity,
                },
            })
            .collect();
        conjunction(&lits)
    });
    Precondition::from_clauses(clauses).clauses
}

pub fn normalize_summary(s: &ExceptionSummary) -> SummaryKey {
    SummaryKey {
        exception_type: s.exception_type.clone(),
        message_pattern: s.message_pattern.clone(),
        precondition: canonical_clauses(&s.precondition),
        key_precondition: canonical_clauses(&s.key_precondition),
    }
}
