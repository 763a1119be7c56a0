//! Symbolic values of EXIR variables and their canonical text form.
//!
//! Atoms are rendered with every nested binary or concat operand in
//! parentheses, so one rendering has exactly one parse.

use std::fmt::{self, Display, Formatter};

use crate::exir::lexer::{quote, tokenize, Tok};
use crate::exir::{BinOp, Const, RelOp, UnOp};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Callee {
    /// `Class::name(..)`
    Static { class: String, name: String },
    /// `recv.name(..)`
    Method { receiver: Box<Expr>, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    /// The method's `K`-th parameter, rendered `parameterK`.
    Param(usize),
    Const(Const),
    /// A static field without a usable initial value, rendered `Class.F`.
    Static {
        class: String,
        field: String,
    },
    /// A value the analysis cannot name.
    Unknown,
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Unary(UnOp, Box<Expr>),
    Call {
        callee: Callee,
        args: Vec<Expr>,
    },
    Field(Box<Expr>, String),
    Concat(Vec<Expr>),
}

impl Expr {
    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    /// Builds a unary expression, folding it into a constant when the operand
    /// is one.
    pub fn unary(op: UnOp, a: Expr) -> Expr {
        match (op, a) {
            (UnOp::Neg, Expr::Const(Const::Int(v))) if v != i64::MIN => Expr::Const(Const::Int(-v)),
            (UnOp::Not, Expr::Const(Const::Bool(b))) => Expr::Const(Const::Bool(!b)),
            (op, a) => Expr::Unary(op, Box::new(a)),
        }
    }

    pub fn contains_unknown(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| found |= matches!(e, Expr::Unknown));
        found
    }

    fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Binary(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Expr::Unary(_, a) | Expr::Field(a, _) => a.visit(f),
            Expr::Call { callee, args } => {
                if let Callee::Method { receiver, .. } = callee {
                    receiver.visit(f);
                }
                args.iter().for_each(|a| a.visit(f));
            }
            Expr::Concat(parts) => parts.iter().for_each(|a| a.visit(f)),
            Expr::Param(_) | Expr::Const(_) | Expr::Static { .. } | Expr::Unknown => {}
        }
    }

    /// Replaces `parameterK` by `args[K]`; out-of-range parameters become
    /// unknown.
    pub fn substitute(&self, args: &[Expr]) -> Expr {
        let sub = |e: &Expr| e.substitute(args);
        match self {
            Expr::Param(k) => args.get(*k).cloned().unwrap_or(Expr::Unknown),
            Expr::Const(_) | Expr::Static { .. } | Expr::Unknown => self.clone(),
            Expr::Binary(op, a, b) => Expr::binary(*op, sub(a), sub(b)),
            Expr::Unary(op, a) => Expr::unary(*op, sub(a)),
            Expr::Call {
                callee,
                args: call_args,
            } => Expr::Call {
                callee: match callee {
                    Callee::Static { .. } => callee.clone(),
                    Callee::Method { receiver, name } => Callee::Method {
                        receiver: Box::new(sub(receiver)),
                        name: name.clone(),
                    },
                },
                args: call_args.iter().map(sub).collect(),
            },
            Expr::Field(base, f) => Expr::Field(Box::new(sub(base)), f.clone()),
            Expr::Concat(parts) => Expr::Concat(parts.iter().map(sub).collect()),
        }
    }
}

fn needs_parens_as_operand(e: &Expr) -> bool {
    matches!(e, Expr::Binary(..) | Expr::Concat(_))
}

fn needs_parens_as_base(e: &Expr) -> bool {
    matches!(
        e,
        Expr::Binary(..) | Expr::Concat(_) | Expr::Unary(..) | Expr::Const(_)
    )
}

struct Wrapped<'a>(&'a Expr, bool);

impl Display for Wrapped<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

fn operand(e: &Expr) -> Wrapped<'_> {
    Wrapped(e, needs_parens_as_operand(e))
}

fn base(e: &Expr) -> Wrapped<'_> {
    Wrapped(e, needs_parens_as_base(e))
}

fn write_args(f: &mut Formatter<'_>, args: &[Expr]) -> fmt::Result {
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Param(k) => write!(f, "parameter{k}"),
            Expr::Const(Const::Str(s)) => f.write_str(&quote(s)),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Static { class, field } => write!(f, "{class}.{field}"),
            Expr::Unknown => f.write_str("unknown"),
            Expr::Binary(op, a, b) => write!(f, "{} {} {}", operand(a), op.symbol(), operand(b)),
            Expr::Unary(op, a) => write!(f, "{}{}", op.symbol(), operand(a)),
            Expr::Call { callee, args } => {
                match callee {
                    Callee::Static { class, name } => write!(f, "{class}::{name}")?,
                    Callee::Method { receiver, name } => write!(f, "{}.{name}", base(receiver))?,
                }
                write_args(f, args)
            }
            Expr::Field(b, field) => write!(f, "{}.{field}", base(b)),
            Expr::Concat(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ++ ")?;
                    }
                    write!(f, "{}", operand(p))?;
                }
                Ok(())
            }
        }
    }
}

/// Parses the rendering produced by `Display`.
pub fn parse_expr(text: &str) -> Result<Expr, String> {
    let toks: Vec<Tok> = tokenize(text)
        .map_err(|(col, msg)| format!("{col}: {msg}"))?
        .into_iter()
        .map(|t| t.tok)
        .collect();
    let mut p = AtomParser { toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(format!("trailing tokens in `{text}`"));
    }
    Ok(e)
}

struct AtomParser {
    toks: Vec<Tok>,
    pos: usize,
}

impl AtomParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&Tok> {
        self.toks.get(self.pos + n)
    }

    fn at(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn eat(&mut self, p: &str) -> bool {
        let hit = self.at(p);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect(&mut self, p: &str) -> Result<(), String> {
        if self.eat(p) {
            Ok(())
        } else {
            Err(format!("expected `{p}` at token {}", self.pos))
        }
    }

    fn ident(&mut self) -> Result<String, String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(format!("expected identifier at token {}", self.pos)),
        }
    }

    fn expr(&mut self) -> Result<Expr, String> {
        let first = self.unary()?;
        if self.at("++") {
            let mut parts = vec![first];
            while self.eat("++") {
                parts.push(self.unary()?);
            }
            return Ok(Expr::Concat(parts));
        }
        if let Some(Tok::Punct(p)) = self.peek() {
            if let Some(op) = BinOp::from_symbol(p) {
                self.pos += 1;
                let rhs = self.unary()?;
                return Ok(Expr::binary(op, first, rhs));
            }
        }
        Ok(first)
    }

    fn unary(&mut self) -> Result<Expr, String> {
        if self.eat("!") {
            return Ok(Expr::unary(UnOp::Not, self.unary()?));
        }
        if self.eat("-") {
            return Ok(Expr::unary(UnOp::Neg, self.unary()?));
        }
        self.postfix()
    }

    fn args(&mut self) -> Result<Vec<Expr>, String> {
        self.expect("(")?;
        let mut args = Vec::new();
        if !self.eat(")") {
            loop {
                args.push(self.expr()?);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        Ok(args)
    }

    fn postfix(&mut self) -> Result<Expr, String> {
        let mut e = self.primary()?;
        while self.eat(".") {
            let name = self.ident()?;
            if self.at("(") {
                let args = self.args()?;
                e = Expr::Call {
                    callee: Callee::Method {
                        receiver: Box::new(e),
                        name,
                    },
                    args,
                };
            } else {
                e = Expr::Field(Box::new(e), name);
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr, String> {
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| "unexpected end of atom".to_string())?;
        self.pos += 1;
        match tok {
            Tok::Int(v) => Ok(Expr::Const(Const::Int(v))),
            Tok::Str(s) => Ok(Expr::Const(Const::Str(s))),
            Tok::Punct("(") => {
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Tok::Ident(id) => match id.as_str() {
                "true" => Ok(Expr::Const(Const::Bool(true))),
                "false" => Ok(Expr::Const(Const::Bool(false))),
                "null" => Ok(Expr::Const(Const::Null)),
                "unknown" => Ok(Expr::Unknown),
                _ => {
                    if let Some(k) = id
                        .strip_prefix("parameter")
                        .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                    {
                        return k
                            .parse()
                            .map(Expr::Param)
                            .map_err(|_| format!("bad parameter index in `{id}`"));
                    }
                    if self.eat("::") {
                        let name = self.ident()?;
                        let args = self.args()?;
                        return Ok(Expr::Call {
                            callee: Callee::Static { class: id, name },
                            args,
                        });
                    }
                    if matches!(self.peek(), Some(Tok::Punct("."))) {
                        if let Some(Tok::Ident(field)) = self.peek_at(1).cloned() {
                            if !matches!(self.peek_at(2), Some(Tok::Punct("("))) {
                                self.pos += 2;
                                return Ok(Expr::Static { class: id, field });
                            }
                        }
                    }
                    Err(format!("unexpected identifier `{id}`"))
                }
            },
            Tok::Punct(p) => Err(format!("unexpected `{p}`")),
        }
    }
}

/// A canonical literal: an atom and the truth value it must take.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Normalized {
    Literal {
        atom: String,
        polarity: bool,
    },
    /// The literal folded to a constant truth value.
    Const(bool),
}

fn eval_rel(op: RelOp, a: &Const, b: &Const) -> Option<bool> {
    match op {
        RelOp::Eq => Some(a == b),
        RelOp::Ne => Some(a != b),
        _ => match (a, b) {
            (Const::Int(x), Const::Int(y)) => Some(match op {
                RelOp::Lt => x < y,
                RelOp::Le => x <= y,
                RelOp::Gt => x > y,
                RelOp::Ge => x >= y,
                RelOp::Eq | RelOp::Ne => unreachable!(),
            }),
            _ => None,
        },
    }
}

fn mirrored(op: RelOp) -> RelOp {
    match op {
        RelOp::Lt => RelOp::Gt,
        RelOp::Gt => RelOp::Lt,
        RelOp::Le => RelOp::Ge,
        RelOp::Ge => RelOp::Le,
        o => o,
    }
}

/// Canonicalizes `(e, polarity)`:
///
/// * `!x` flips the polarity;
/// * `x == true`, `x != false` and friends reduce to `x`;
/// * relations use only `==`, `<` and `>` (`!=`, `>=`, `<=` flip polarity);
/// * a constant operand is moved to the right;
/// * fully constant relations fold to a truth value.
pub fn normalize_literal(e: Expr, polarity: bool) -> Normalized {
    let mut e = e;
    let mut pol = polarity;
    loop {
        match e {
            Expr::Unary(UnOp::Not, x) => {
                e = *x;
                pol = !pol;
            }
            Expr::Const(Const::Bool(b)) => return Normalized::Const(b == pol),
            Expr::Binary(BinOp::Rel(op), a, b) => {
                if let (Expr::Const(x), Expr::Const(y)) = (&*a, &*b) {
                    if let Some(v) = eval_rel(op, x, y) {
                        return Normalized::Const(v == pol);
                    }
                }
                if matches!(op, RelOp::Eq | RelOp::Ne) {
                    let bool_side = match (&*a, &*b) {
                        (x, Expr::Const(Const::Bool(v))) => Some((x.clone(), *v)),
                        (Expr::Const(Const::Bool(v)), y) => Some((y.clone(), *v)),
                        _ => None,
                    };
                    if let Some((x, v)) = bool_side {
                        pol ^= !v ^ (op == RelOp::Ne);
                        e = x;
                        continue;
                    }
                }
                let (op, flip) = match op {
                    RelOp::Ne => (RelOp::Eq, true),
                    RelOp::Ge => (RelOp::Lt, true),
                    RelOp::Le => (RelOp::Gt, true),
                    o => (o, false),
                };
                let (op, a, b) = if matches!(*a, Expr::Const(_)) && !matches!(*b, Expr::Const(_)) {
                    (mirrored(op), b, a)
                } else {
                    (op, a, b)
                };
                return Normalized::Literal {
                    atom: Expr::Binary(BinOp::Rel(op), a, b).to_string(),
                    polarity: pol ^ flip,
                };
            }
            other => {
                return Normalized::Literal {
                    atom: other.to_string(),
                    polarity: pol,
                }
            }
        }
    }
}
