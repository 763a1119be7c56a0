//! Preconditions in disjunctive normal form.

use std::collections::BTreeSet;
use std::fmt::{self, Display, Formatter};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub atom: String,
    pub polarity: bool,
}

impl Literal {
    pub fn new(atom: impl Into<String>, polarity: bool) -> Self {
        Literal {
            atom: atom.into(),
            polarity,
        }
    }

    pub fn negated(&self) -> Literal {
        Literal {
            atom: self.atom.clone(),
            polarity: !self.polarity,
        }
    }
}

impl Display for Literal {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} is {}", self.atom, self.polarity)
    }
}

/// A conjunction of literals.
pub type Clause = BTreeSet<Literal>;

fn contradictory(c: &Clause) -> bool {
    c.iter().any(|l| c.contains(&l.negated()))
}

/// A disjunction of clauses. `{∅}` is TRUE and `{}` is FALSE.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Precondition {
    pub clauses: BTreeSet<Clause>,
    pub truncated: bool,
    pub clause_limit_hit: bool,
}

impl Default for Precondition {
    fn default() -> Self {
        Precondition::falsity()
    }
}

impl Precondition {
    pub fn truth() -> Self {
        Precondition::from_clauses([Clause::new()])
    }

    pub fn falsity() -> Self {
        Precondition {
            clauses: BTreeSet::new(),
            truncated: false,
            clause_limit_hit: false,
        }
    }

    /// Canonical disjunction of `clauses`: contradictory clauses are dropped
    /// and clauses implied by a smaller one are absorbed.
    pub fn from_clauses(clauses: impl IntoIterator<Item = Clause>) -> Self {
        let mut p = Precondition::falsity();
        p.clauses = canonical(clauses);
        p
    }

    pub fn is_true(&self) -> bool {
        self.clauses.len() == 1 && self.clauses.iter().all(|c| c.is_empty())
    }

    pub fn is_false(&self) -> bool {
        self.clauses.is_empty()
    }

    fn flags_from(mut self, a: &Precondition, b: &Precondition) -> Self {
        self.truncated |= a.truncated || b.truncated;
        self.clause_limit_hit |= a.clause_limit_hit || b.clause_limit_hit;
        self
    }

    pub fn or(&self, other: &Precondition) -> Precondition {
        Precondition::from_clauses(self.clauses.iter().chain(&other.clauses).cloned())
            .flags_from(self, other)
    }

    /// Conjunction by pairwise clause products. When more than
    /// `clause_limit` clauses result, the conjunction is abandoned and `self`
    /// is returned with `clause_limit_hit` set.
    pub fn and(&self, other: &Precondition, clause_limit: usize) -> Precondition {
        let product = canonical(
            self.clauses
                .iter()
                .flat_map(|a| other.clauses.iter().map(move |b| a | b)),
        );
        if product.len() > clause_limit {
            let mut p = self.clone().flags_from(self, other);
            p.clause_limit_hit = true;
            return p;
        }
        let mut p = Precondition::falsity().flags_from(self, other);
        p.clauses = product;
        p
    }

    /// Each clause as `a is true ∧ b is false`, one per line of the result.
    pub fn render(&self) -> String {
        if self.is_true() {
            return "TRUE".to_string();
        }
        if self.is_false() {
            return "FALSE".to_string();
        }
        self.clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
                    .join(" ∧ ")
            })
            .collect::<Vec<_>>()
            .join(" ∨ ")
    }
}

fn canonical(clauses: impl IntoIterator<Item = Clause>) -> BTreeSet<Clause> {
    let set: BTreeSet<Clause> = clauses.into_iter().filter(|c| !contradictory(c)).collect();
    set.iter()
        .filter(|c| !set.iter().any(|d| d != *c && d.is_subset(c)))
        .cloned()
        .collect()
}

/// ¬p by De Morgan expansion. If an intermediate product exceeds
/// `clause_limit` clauses the negation is given up: the result is TRUE with
/// `clause_limit_hit` set.
pub fn negate_precondition(p: &Precondition, clause_limit: usize) -> Precondition {
    let mut acc: BTreeSet<Clause> = BTreeSet::from([Clause::new()]);
    for clause in &p.clauses {
        acc = canonical(acc.iter().flat_map(|a| {
            clause.iter().map(move |l| {
                let mut c = a.clone();
                c.insert(l.negated());
                c
            })
        }));
        if acc.len() > clause_limit {
            let mut out = Precondition::truth();
            out.truncated = p.truncated;
            out.clause_limit_hit = true;
            return out;
        }
    }
    Precondition {
        clauses: acc,
        truncated: p.truncated,
        clause_limit_hit: p.clause_limit_hit,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(atom: &str, pol: bool) -> Literal {
        Literal::new(atom, pol)
    }

    fn pre(clauses: &[&[(&str, bool)]]) -> Precondition {
        Precondition::from_clauses(
            clauses
                .iter()
                .map(|c| c.iter().map(|(a, p)| l(a, *p)).collect()),
        )
    }

    #[test]
    fn truth_and_falsity() {
        assert!(Precondition::truth().is_true());
        assert!(Precondition::falsity().is_false());
        assert!(negate_precondition(&Precondition::truth(), 16).is_false());
        assert!(negate_precondition(&Precondition::falsity(), 16).is_true());
    }

    #[test]
    fn not_null_from_null_check() {
        let p = pre(&[&[("parameter0 == null", true)]]);
        assert_eq!(
            negate_precondition(&p, 16),
            pre(&[&[("parameter0 == null", false)]])
        );
    }

    #[test]
    fn de_morgan_three_atoms() {
        let p = pre(&[&[("a", true), ("b", true)], &[("c", true)]]);
        assert_eq!(
            negate_precondition(&p, 2),
            pre(&[&[("a", false), ("c", false)], &[("b", false), ("c", false)]])
        );
        let hit = negate_precondition(&p, 1);
        assert!(hit.is_true() && hit.clause_limit_hit);
    }

    #[test]
    fn canonical_form_drops_contradictions_and_absorbs() {
        let p = pre(&[
            &[("a", true), ("a", false)],
            &[("b", true), ("c", true)],
            &[("b", true)],
            &[("b", true)],
        ]);
        assert_eq!(p, pre(&[&[("b", true)]]));
        assert_eq!(p.render(), "b is true");
    }

    #[test]
    fn conjunction_and_limit() {
        let a = pre(&[&[("a", true)], &[("b", true)]]);
        let c = pre(&[&[("c", true)], &[("d", true)]]);
        assert_eq!(a.and(&c, 16).clauses.len(), 4);
        let capped = a.and(&c, 3);
        assert!(capped.clause_limit_hit);
        assert_eq!(capped.clauses, a.clauses);
        assert!(a.and(&Precondition::falsity(), 16).is_false());
        assert_eq!(a.and(&Precondition::truth(), 16).clauses, a.clauses);
    }
}
