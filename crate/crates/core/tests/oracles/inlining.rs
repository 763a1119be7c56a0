use std::collections::BTreeSet;
use std::fmt::Write;

use exlife_core::exir::{parse_program, MethodId};
use exlife_core::matching::canonical_clauses;
use exlife_core::summary::{extract_summaries, flags, Clause, ExtractOptions, Mode};
use rand::seq::SliceRandom;
use rand::Rng;

const OPS: [&str; 6] = ["==", "!=", "<", ">", "<=", ">="];
const TYPES: [&str; 3] = [
    "IllegalArgumentException",
    "IllegalStateException",
    "IOException",
];

struct Guard {
    var: usize,
    op: &'static str,
    value: i64,
    /// Throws on the true branch; otherwise returns early.
    throws: bool,
    exception: &'static str,
}

fn guard(rng: &mut impl Rng, throw_chance: f64) -> Guard {
    let throws = rng.gen_bool(throw_chance);
    Guard {
        var: rng.gen_range(0..2),
        op: OPS.choose(rng).unwrap(),
        value: rng.gen_range(0..5),
        throws,
        exception: TYPES.choose(rng).unwrap(),
    }
}

/// A caller with guards around one or two calls of a guarded callee, in
/// both the calling form and the hand-inlined form.
pub struct TwoLevel {
    pub original: String,
    pub inlined: String,
}

fn callee_body(out: &mut String, guards: &[Guard], vars: [&str; 2], suffix: &str, ret: &str) {
    for (i, g) in guards.iter().enumerate() {
        let target = if g.throws {
            format!("T{i}{suffix}")
        } else {
            format!("R{suffix}")
        };
        let _ = writeln!(
            out,
            "  if {} {} {} goto {target}",
            vars[g.var], g.op, g.value
        );
    }
    let _ = writeln!(out, "R{suffix}:\n  {ret}");
    for (i, g) in guards.iter().enumerate().filter(|(_, g)| g.throws) {
        let _ = writeln!(out, "T{i}{suffix}:\n  throw {} \"g{i}\"", g.exception);
    }
}

pub fn random_two_level(rng: &mut impl Rng) -> TwoLevel {
    let callee: Vec<Guard> = (0..rng.gen_range(1..=3))
        .map(|i| guard(rng, if i == 0 { 1.0 } else { 0.7 }))
        .collect();
    let before: Vec<Guard> = (0..rng.gen_range(0..=2)).map(|_| guard(rng, 0.6)).collect();
    let trailing = rng.gen_bool(0.5).then(|| guard(rng, 1.0));
    let args = ["x", "y", "t", "2"];
    let calls: Vec<[&str; 2]> = (0..rng.gen_range(1..=2))
        .map(|_| [*args.choose(rng).unwrap(), *args.choose(rng).unwrap()])
        .collect();
    let offset = rng.gen_range(1..3);

    let mut callee_src =
        String::from("private method B::g(int, int) {\n  a := param 0\n  b := param 1\n");
    callee_body(&mut callee_src, &callee, ["a", "b"], "", "return");
    callee_src.push_str("}\n");

    let render = |inline: bool| {
        let mut out = String::from("method A::f(int, int) {\n  x := param 0\n  y := param 1\n");
        let _ = writeln!(out, "  t := x + {offset}");
        for (i, g) in before.iter().enumerate() {
            let var = ["x", "y"][g.var];
            let target = if g.throws {
                format!("F{i}")
            } else {
                "SKIP".to_string()
            };
            let _ = writeln!(out, "  if {var} {} {} goto {target}", g.op, g.value);
        }
        for (k, [u, v]) in calls.iter().enumerate() {
            if inline {
                let (a, b) = (format!("a_{k}"), format!("b_{k}"));
                let _ = writeln!(out, "  {a} := {u}\n  {b} := {v}");
                callee_body(
                    &mut out,
                    &callee,
                    [&a, &b],
                    &format!("_{k}"),
                    &format!("goto C_{k}"),
                );
                let _ = writeln!(out, "C_{k}:");
            }
            if !inline {
                let _ = writeln!(out, "  call B::g({u}, {v})");
            }
            if k == 0 {
                out.push_str("SKIP:\n");
            }
        }
        if let Some(g) = &trailing {
            let _ = writeln!(
                out,
                "  if {} {} {} goto LAST",
                ["x", "y"][g.var],
                g.op,
                g.value
            );
        }
        out.push_str("  return\n");
        if let Some(g) = &trailing {
            let _ = writeln!(out, "LAST:\n  throw {} \"last\"", g.exception);
        }
        for (i, g) in before.iter().enumerate().filter(|(_, g)| g.throws) {
            let _ = writeln!(out, "F{i}:\n  throw {} \"f{i}\"", g.exception);
        }
        out.push_str("}\n");
        out
    };

    TwoLevel {
        original: format!("{}{callee_src}", render(false)),
        inlined: render(true),
    }
}

/// Truth table of a disjunction over `atoms`, each atom an independent
/// boolean.
fn truth_table(clauses: &BTreeSet<Clause>, atoms: &[String]) -> Vec<bool> {
    (0..1u64 << atoms.len())
        .map(|a| {
            clauses.iter().any(|c| {
                c.iter().all(|l| {
                    let i = atoms.iter().position(|x| *x == l.atom).unwrap();
                    (a >> i & 1 == 1) == l.polarity
                })
            })
        })
        .collect()
}

pub enum Outcome {
    Equal,
    /// A limit was reached, so the comparison does not apply.
    OutOfLimits,
}

type Row = (String, String, BTreeSet<Clause>);

fn rows(src: &str, mode: Mode) -> Result<(Vec<Row>, bool), String> {
    let p = parse_program(src, "v").map_err(|e| format!("{e}\n{src}"))?;
    let opts = ExtractOptions {
        mode,
        ..ExtractOptions::default()
    };
    let r = extract_summaries(&p, &opts);
    let f = MethodId::new("A", "f", &["int", "int"]);
    let api = r.api(&f).ok_or("no summaries for A::f")?;
    let limited = api
        .summaries
        .iter()
        .any(|s| s.has_flag(flags::TRUNCATED) || s.has_flag(flags::CLAUSE_LIMIT_HIT));
    let rows = api
        .summaries
        .iter()
        .map(|s| {
            (
                s.exception_type.clone(),
                s.message_pattern.clone(),
                canonical_clauses(&s.precondition),
            )
        })
        .collect();
    Ok((rows, limited))
}

/// Interprocedural summaries of the caller against intraprocedural
/// summaries of its inlined form.
pub fn check_inlining(case: &TwoLevel) -> Result<Outcome, String> {
    let (inter, a) = rows(&case.original, Mode::Inter)?;
    let (intra, b) = rows(&case.inlined, Mode::Intra)?;
    if a || b {
        return Ok(Outcome::OutOfLimits);
    }
    let atoms: Vec<String> = inter
        .iter()
        .chain(&intra)
        .flat_map(|(_, _, p)| p.iter().flatten().map(|l| l.atom.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let sig = |rows: &[Row]| {
        let mut v: Vec<(String, String, Vec<bool>)> = rows
            .iter()
            .map(|(t, m, p)| (t.clone(), m.clone(), truth_table(p, &atoms)))
            .collect();
        v.sort();
        v
    };
    if sig(&inter) == sig(&intra) {
        Ok(Outcome::Equal)
    } else {
        let show = |rows: &[Row]| {
            rows.iter()
                .map(|(t, m, p)| format!("  {t} {m:?} {p:?}"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        Err(format!(
            "original:\n{}\ninlined:\n{}\ninter:\n{}\nintra:\n{}",
            case.original,
            case.inlined,
            show(&inter),
            show(&intra)
        ))
    }
}
