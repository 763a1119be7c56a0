use std::collections::BTreeSet;

use exlife_core::summary::{negate_precondition, Clause, Literal, Precondition};

pub const ATOMS: [&str; 4] = ["p0", "p1", "p2", "p3"];

fn holds(p: &Precondition, assignment: u32) -> bool {
    p.clauses.iter().any(|c| {
        c.iter().all(|l| {
            let i = ATOMS.iter().position(|a| *a == l.atom).expect("known atom");
            (assignment >> i & 1 == 1) == l.polarity
        })
    })
}

/// `None` when the clause limit cut the negation short, otherwise whether
/// the negation is the complement of `p` on every assignment.
pub fn negation_agrees(p: &Precondition, clause_limit: usize) -> Option<bool> {
    let n = negate_precondition(p, clause_limit);
    if n.clause_limit_hit {
        return None;
    }
    Some((0..1u32 << ATOMS.len()).all(|a| holds(p, a) != holds(&n, a)))
}

/// Every clause over the first `atoms` atoms: each atom absent, true or false.
pub fn all_clauses(atoms: usize) -> Vec<Clause> {
    (0..3usize.pow(atoms as u32))
        .map(|mut code| {
            let mut c = BTreeSet::new();
            for atom in ATOMS.iter().take(atoms) {
                match code % 3 {
                    1 => {
                        c.insert(Literal::new(*atom, true));
                    }
                    2 => {
                        c.insert(Literal::new(*atom, false));
                    }
                    _ => {}
                }
                code /= 3;
            }
            c
        })
        .collect()
}

fn subsets(
    items: &[Clause],
    size: usize,
    start: usize,
    cur: &mut Vec<Clause>,
    out: &mut Vec<Precondition>,
) {
    if cur.len() == size {
        out.push(Precondition::from_clauses(cur.iter().cloned()));
        return;
    }
    for i in start..items.len() {
        cur.push(items[i].clone());
        subsets(items, size, i + 1, cur, out);
        cur.pop();
    }
}

/// Every disjunction over two atoms, every disjunction of at most two
/// clauses over four atoms and every three-clause disjunction over three.
pub fn exhaustive_preconditions() -> Vec<Precondition> {
    let mut out = Vec::new();
    let two = all_clauses(2);
    for mask in 0u32..1 << two.len() {
        out.push(Precondition::from_clauses(
            two.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, c)| c.clone()),
        ));
    }
    let four = all_clauses(4);
    for size in 0..=2 {
        subsets(&four, size, 0, &mut Vec::new(), &mut out);
    }
    subsets(&all_clauses(3), 3, 0, &mut Vec::new(), &mut out);
    out
}

pub struct NegationTally {
    pub checked: usize,
    pub limit_hit: usize,
    pub mismatches: Vec<Precondition>,
}

pub fn exhaustive_negation(clause_limit: usize) -> NegationTally {
    let mut t = NegationTally {
        checked: 0,
        limit_hit: 0,
        mismatches: Vec::new(),
    };
    for p in exhaustive_preconditions() {
        match negation_agrees(&p, clause_limit) {
            None => t.limit_hit += 1,
            Some(ok) => {
                t.checked += 1;
                if !ok {
                    t.mismatches.push(p);
                }
            }
        }
    }
    t
}
