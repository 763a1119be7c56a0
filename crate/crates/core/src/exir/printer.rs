//! Canonical EXIR text. `parse_program(&p.to_string(), ..)` reproduces `p`.

use std::fmt::{self, Display, Formatter, Write};

use super::lexer::quote;
use super::{
    CallExpr, CallTarget, Condition, Const, ExirMethod, ExirProgram, Operand, Rvalue, StaticField,
    StmtKind,
};

impl Display for Const {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Const::Int(v) => write!(f, "{v}"),
            Const::Str(s) => f.write_str(&quote(s)),
            Const::Bool(b) => write!(f, "{b}"),
            Const::Null => f.write_str("null"),
        }
    }
}

impl Display for Operand {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Var(v) => f.write_str(v),
            Operand::Const(c) => c.fmt(f),
        }
    }
}

fn join(parts: &[Operand], sep: &str) -> String {
    let mut out = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        let _ = write!(out, "{p}");
    }
    out
}

impl Display for CallExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match &self.target {
            CallTarget::Static { class, name } => write!(f, "{class}::{name}")?,
            CallTarget::Virtual { receiver, name } => write!(f, "{receiver}.{name}")?,
        }
        write!(f, "({})", join(&self.args, ", "))
    }
}

impl Display for Rvalue {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Rvalue::Param(k) => write!(f, "param {k}"),
            Rvalue::Use(a) => write!(f, "{a}"),
            Rvalue::Binary(op, a, b) => write!(f, "{a} {} {b}", op.symbol()),
            Rvalue::Unary(op, a) => write!(f, "{}{a}", op.symbol()),
            Rvalue::Field { base, field } => write!(f, "{base}.{field}"),
            Rvalue::Static { class, field } => write!(f, "static {class}.{field}"),
            Rvalue::Concat(parts) => f.write_str(&join(parts, " ++ ")),
            Rvalue::Call(c) => write!(f, "call {c}"),
        }
    }
}

impl Display for Condition {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Compare(op, a, b) => write!(f, "{a} {} {b}", op.symbol()),
            Condition::Test(a) => write!(f, "{a}"),
        }
    }
}

impl Display for StmtKind {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            StmtKind::Assign { dst, value } => write!(f, "{dst} := {value}"),
            StmtKind::If { cond, target } => write!(f, "if {cond} goto {target}"),
            StmtKind::Goto(l) => write!(f, "goto {l}"),
            StmtKind::Throw { exception, message } => match message {
                Some(parts) => write!(f, "throw {exception} {}", join(parts, " ++ ")),
                None => write!(f, "throw {exception}"),
            },
            StmtKind::Return(Some(v)) => write!(f, "return {v}"),
            StmtKind::Return(None) => f.write_str("return"),
            StmtKind::Call(c) => write!(f, "call {c}"),
        }
    }
}

impl Display for StaticField {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str("static ")?;
        if self.mutable {
            f.write_str("mut ")?;
        }
        write!(f, "{}.{}", self.class, self.name)?;
        if let Some(init) = &self.init {
            write!(f, " = {init}")?;
        }
        Ok(())
    }
}

impl Display for ExirMethod {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if !self.public {
            f.write_str("private ")?;
        }
        writeln!(
            f,
            "method {}::{}({}) {{",
            self.id.class,
            self.id.name,
            self.id.params.join(", ")
        )?;
        for stmt in &self.body {
            for l in &stmt.labels {
                writeln!(f, "{l}:")?;
            }
            writeln!(f, "  {}", stmt.kind)?;
        }
        f.write_str("}\n")
    }
}

impl Display for ExirProgram {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for s in &self.statics {
            writeln!(f, "{s}")?;
        }
        for (i, m) in self.methods.iter().enumerate() {
            if i > 0 || !self.statics.is_empty() {
                f.write_str("\n")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}
