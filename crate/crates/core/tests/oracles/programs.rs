use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::Rng;

const TYPES: [&str; 3] = ["int", "File", "String"];
const EXCEPTIONS: [&str; 3] = [
    "IllegalArgumentException",
    "IOException",
    "IllegalStateException",
];
const RELS: [&str; 6] = ["==", "!=", "<", "<=", ">", ">="];
const BINS: [&str; 5] = ["+", "-", "*", "%", "&"];

struct Sig {
    name: String,
    params: Vec<&'static str>,
}

fn var(rng: &mut impl Rng, vars: &[String]) -> Option<String> {
    vars.choose(rng).cloned()
}

fn operand(rng: &mut impl Rng, vars: &[String]) -> String {
    match rng.gen_range(0..6) {
        0 => rng.gen_range(-2..6).to_string(),
        1 => "null".to_string(),
        _ => vars.choose(rng).cloned().unwrap_or_else(|| "0".to_string()),
    }
}

/// A random program using every statement form: several methods calling
/// each other (cycles included), external and receiver calls, statics,
/// loops and throws.
pub fn random_program(rng: &mut impl Rng) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "static C.MAX = {}", rng.gen_range(0..10));
    out.push_str("static mut C.COUNT = 0\nstatic C.NAME = \"n\"\n");
    let sigs: Vec<Sig> = (0..rng.gen_range(2..6))
        .map(|i| Sig {
            name: format!("m{i}"),
            params: (0..rng.gen_range(0..3))
                .map(|_| *TYPES.choose(rng).unwrap())
                .collect(),
        })
        .collect();
    for sig in &sigs {
        let private = if rng.gen_bool(0.3) { "private " } else { "" };
        let _ = writeln!(
            out,
            "\n{private}method A::{}({}) {{",
            sig.name,
            sig.params.join(", ")
        );
        let mut vars: Vec<String> = Vec::new();
        let mut body: Vec<String> = Vec::new();
        for k in 0..sig.params.len() {
            body.push(format!("p{k} := param {k}"));
            vars.push(format!("p{k}"));
        }
        let len = rng.gen_range(1..12);
        let labels = rng.gen_range(1..4);
        for i in 0..len {
            let v = format!("v{i}");
            let stmt = match rng.gen_range(0..18) {
                0 => format!("{v} := {}", operand(rng, &vars)),
                1 => format!(
                    "{v} := {} {} {}",
                    operand(rng, &vars),
                    BINS.choose(rng).unwrap(),
                    operand(rng, &vars)
                ),
                2 => format!("{v} := -{}", operand(rng, &vars)),
                3 => format!(
                    "{v} := static C.{}",
                    ["MAX", "COUNT", "NAME", "OTHER"].choose(rng).unwrap()
                ),
                4 if !vars.is_empty() => {
                    format!("{v} := call {}.exists()", var(rng, &vars).unwrap())
                }
                5 => format!("{v} := \"s\" ++ {}", operand(rng, &vars)),
                6 => {
                    let callee = sigs.choose(rng).unwrap();
                    let args: Vec<String> =
                        callee.params.iter().map(|_| operand(rng, &vars)).collect();
                    format!("call A::{}({})", callee.name, args.join(", "))
                }
                7 => format!("call Ext::log({})", operand(rng, &vars)),
                8..=11 => format!(
                    "if {} {} {} goto L{}",
                    operand(rng, &vars),
                    RELS.choose(rng).unwrap(),
                    operand(rng, &vars),
                    rng.gen_range(0..labels)
                ),
                14 => format!(
                    "if {} == false goto L{}",
                    operand(rng, &vars),
                    rng.gen_range(0..labels)
                ),
                15 if rng.gen_bool(0.3) => format!("goto L{}", rng.gen_range(0..labels)),
                12 | 16 => format!(
                    "throw {} \"bad \" ++ {}",
                    EXCEPTIONS.choose(rng).unwrap(),
                    operand(rng, &vars)
                ),
                13 if !vars.is_empty() => format!("{v} := {}.len", var(rng, &vars).unwrap()),
                _ => format!("{v} := {}", operand(rng, &vars)),
            };
            if stmt.starts_with(&v) {
                vars.push(v);
            }
            body.push(stmt);
        }
        body.push(match vars.choose(rng) {
            Some(v) if rng.gen_bool(0.5) => format!("return {v}"),
            _ => "return".to_string(),
        });
        let mut at: Vec<usize> = (0..labels).map(|_| rng.gen_range(0..body.len())).collect();
        at.sort_unstable();
        for (i, line) in body.iter().enumerate() {
            for (l, _) in at.iter().enumerate().filter(|(_, &p)| p == i) {
                let _ = writeln!(out, "L{l}:");
            }
            let _ = writeln!(out, "  {line}");
        }
        out.push_str("}\n");
    }
    out
}
