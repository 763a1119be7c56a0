//! Exception message patterns.

use std::collections::BTreeSet;

use regex::Regex;

use crate::exir::{CallTarget, Const, ExirMethod, Operand, Rvalue, StmtKind};

enum Piece {
    Text(String),
    Wild,
}

fn const_text(c: &Const) -> String {
    match c {
        Const::Str(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Unique definition of `var` in the method, if there is exactly one.
fn unique_def<'a>(method: &'a ExirMethod, var: &str) -> Option<&'a Rvalue> {
    let mut defs = method.body.iter().filter_map(|s| match &s.kind {
        StmtKind::Assign { dst, value } if dst == var => Some(value),
        _ => None,
    });
    let first = defs.next()?;
    defs.next().is_none().then_some(first)
}

/// Splits a `String.format` pattern; every conversion is dynamic.
fn format_pieces(fmt: &str, out: &mut Vec<Piece>) {
    let mut text = String::new();
    let mut chars = fmt.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '%' {
            text.push(c);
            continue;
        }
        match chars.peek() {
            Some('%') => {
                chars.next();
                text.push('%');
            }
            Some('n') => {
                chars.next();
                text.push('\n');
            }
            _ => {
                // flags, width and precision, then the conversion letter
                while chars.peek().is_some_and(|c| !c.is_ascii_alphabetic()) {
                    chars.next();
                }
                chars.next();
                if !text.is_empty() {
                    out.push(Piece::Text(std::mem::take(&mut text)));
                }
                out.push(Piece::Wild);
            }
        }
    }
    if !text.is_empty() {
        out.push(Piece::Text(text));
    }
}

fn trace(method: &ExirMethod, op: &Operand, seen: &mut BTreeSet<String>, out: &mut Vec<Piece>) {
    let var = match op {
        Operand::Const(c) => return out.push(Piece::Text(const_text(c))),
        Operand::Var(v) => v,
    };
    let def = match unique_def(method, var) {
        Some(d) if seen.insert(var.clone()) => d,
        _ => return out.push(Piece::Wild),
    };
    match def {
        Rvalue::Use(inner) => trace(method, inner, seen, out),
        Rvalue::Concat(parts) => {
            for p in parts {
                trace(method, p, seen, out);
            }
        }
        Rvalue::Call(call) => match (&call.target, call.args.split_first()) {
            (CallTarget::Static { class, name }, Some((fmt, _)))
                if class == "String" && name == "format" =>
            {
                let mut fmt_pieces = Vec::new();
                trace(method, fmt, seen, &mut fmt_pieces);
                match fmt_pieces.as_slice() {
                    [Piece::Text(f)] => format_pieces(f, out),
                    _ => out.push(Piece::Wild),
                }
            }
            _ => out.push(Piece::Wild),
        },
        _ => out.push(Piece::Wild),
    }
    seen.remove(var);
}

/// Message pattern of the throw at `site`: constant text regex-escaped,
/// every dynamic part replaced by `.*`. A throw without a message yields the
/// empty pattern.
pub fn reconstruct_message(method: &ExirMethod, site: usize) -> String {
    let parts = match &method.body[site].kind {
        StmtKind::Throw {
            message: Some(parts),
            ..
        } => parts,
        _ => return String::new(),
    };
    let mut pieces = Vec::new();
    let mut seen = BTreeSet::new();
    for p in parts {
        trace(method, p, &mut seen, &mut pieces);
    }
    let mut out = String::new();
    for piece in pieces {
        match piece {
            Piece::Text(t) => out.push_str(&regex::escape(&t)),
            Piece::Wild => {
                if !out.ends_with(".*") {
                    out.push_str(".*");
                }
            }
        }
    }
    out
}

/// Compiles a pattern so that it must match a whole message.
pub fn message_regex(pattern: &str) -> Regex {
    Regex::new(&format!("^(?:{pattern})$")).expect("patterns are built from escaped text")
}
