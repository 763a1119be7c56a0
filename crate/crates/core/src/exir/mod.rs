//! EXIR: a small three-address, branch-explicit intermediate representation.
//!
//! One `.exir` file holds one released version of a code base. The grammar is
//! line oriented:
//!
//! ```text
//! // comment
//! static Config.MAX = 10            // static field with a known initial value
//! static mut Config.COUNTER = 0     // mutated static, reads are unknown
//!
//! private method Util::check(File, String) {
//!   r0 := param 0
//!   z0 := call r0.exists()
//!   if z0 == false goto L1
//!   m := "File " ++ r0 ++ " exists"
//!   throw FileExistsException m
//! L1:
//!   return
//! }
//! ```
//!
//! Statement forms (one per line, optionally prefixed by `Lk:` labels):
//!
//! | form                                   | kind          |
//! |----------------------------------------|---------------|
//! | `v := param K`                         | param-bind    |
//! | `v := <const>` / `v := w`              | assign-const  |
//! | `v := a OP b`                          | assign-binop  |
//! | `v := !a` / `v := -a`                  | assign-unop   |
//! | `v := a.f` / `v := static C.F`         | assign-fieldget |
//! | `v := a ++ b ++ ...`                   | assign-strcat |
//! | `v := call C::m(args)` / `call a.m()`  | assign-call   |
//! | `if a REL b goto L` / `if v goto L`    | if-goto       |
//! | `goto L`                               | goto          |
//! | `throw T` / `throw T <concat>`         | throw         |
//! | `return` / `return a`                  | return        |
//! | `call C::m(args)` / `call a.m(args)`   | call-void     |
//!
//! Static calls `C::m(..)` resolve against the program by class, name and
//! arity; anything unresolved is external. Receiver calls `a.m(..)` are always
//! treated as external opaque calls.

pub(crate) mod lexer;
mod parser;
mod printer;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use parser::parse_program;

/// Errors raised while reading EXIR text.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExirError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}: duplicate method signature {method}")]
    DuplicateMethod { line: usize, method: String },
    #[error("{line}: duplicate static field {field}")]
    DuplicateStatic { line: usize, field: String },
    #[error("in {method}: unresolved label {label}")]
    UnresolvedLabel { method: String, label: String },
    #[error("in {method}: label {label} defined more than once")]
    DuplicateLabel { method: String, label: String },
    #[error("in {method}: label {label} does not precede a statement")]
    DanglingLabel { method: String, label: String },
    #[error("in {method}: `param {index}` out of range for {arity} parameter(s)")]
    ParamIndex {
        method: String,
        index: usize,
        arity: usize,
    },
    #[error("in {method}: variable {var} is used but never assigned")]
    UndefinedVariable { method: String, var: String },
    #[error("in {method}: call to {class}::{name} with {arity} argument(s) is ambiguous")]
    AmbiguousCall {
        method: String,
        class: String,
        name: String,
        arity: usize,
    },
}

/// Method identity: declaring class, method name and parameter types.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MethodId {
    pub class: String,
    pub name: String,
    pub params: Vec<String>,
}

impl MethodId {
    pub fn new(class: impl Into<String>, name: impl Into<String>, params: &[&str]) -> Self {
        MethodId {
            class: class.into(),
            name: name.into(),
            params: params.iter().map(|p| p.to_string()).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}::{}({})",
            self.class,
            self.name,
            self.params.join(",")
        )
    }
}

impl FromStr for MethodId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (class, rest) = s
            .split_once("::")
            .ok_or_else(|| format!("missing `::` in method id `{s}`"))?;
        let (name, rest) = rest
            .split_once('(')
            .ok_or_else(|| format!("missing `(` in method id `{s}`"))?;
        let params = rest
            .strip_suffix(')')
            .ok_or_else(|| format!("missing `)` in method id `{s}`"))?;
        let params = if params.trim().is_empty() {
            Vec::new()
        } else {
            params.split(',').map(|p| p.trim().to_string()).collect()
        };
        if class.is_empty() || name.is_empty() {
            return Err(format!("empty class or method name in `{s}`"));
        }
        Ok(MethodId {
            class: class.to_string(),
            name: name.to_string(),
            params,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Const {
    Int(i64),
    Str(String),
    Bool(bool),
    Null,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Operand {
    Var(String),
    Const(Const),
}

impl Operand {
    pub fn var(&self) -> Option<&str> {
        match self {
            Operand::Var(v) => Some(v),
            Operand::Const(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    BitAnd,
    BitOr,
    BitXor,
    Shl,
    Shr,
    Rel(RelOp),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Eq => "==",
            RelOp::Ne => "!=",
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
        }
    }

    /// The operator whose truth value is the complement of `self`.
    pub fn negated(self) -> RelOp {
        match self {
            RelOp::Eq => RelOp::Ne,
            RelOp::Ne => RelOp::Eq,
            RelOp::Lt => RelOp::Ge,
            RelOp::Ge => RelOp::Lt,
            RelOp::Gt => RelOp::Le,
            RelOp::Le => RelOp::Gt,
        }
    }
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::BitAnd => "&",
            BinOp::BitOr => "|",
            BinOp::BitXor => "^",
            BinOp::Shl => "<<",
            BinOp::Shr => ">>",
            BinOp::Rel(r) => r.symbol(),
        }
    }

    pub fn from_symbol(s: &str) -> Option<BinOp> {
        Some(match s {
            "+" => BinOp::Add,
            "-" => BinOp::Sub,
            "*" => BinOp::Mul,
            "/" => BinOp::Div,
            "%" => BinOp::Rem,
            "&" => BinOp::BitAnd,
            "|" => BinOp::BitOr,
            "^" => BinOp::BitXor,
            "<<" => BinOp::Shl,
            ">>" => BinOp::Shr,
            "==" => BinOp::Rel(RelOp::Eq),
            "!=" => BinOp::Rel(RelOp::Ne),
            "<" => BinOp::Rel(RelOp::Lt),
            "<=" => BinOp::Rel(RelOp::Le),
            ">" => BinOp::Rel(RelOp::Gt),
            ">=" => BinOp::Rel(RelOp::Ge),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnOp {
    Not,
    Neg,
}

impl UnOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnOp::Not => "!",
            UnOp::Neg => "-",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CallTarget {
    /// `Class::name(args)`, resolved by class, name and arity.
    Static { class: String, name: String },
    /// `recv.name(args)`, never resolved.
    Virtual { receiver: String, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CallExpr {
    pub target: CallTarget,
    pub args: Vec<Operand>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rvalue {
    Param(usize),
    Use(Operand),
    Binary(BinOp, Operand, Operand),
    Unary(UnOp, Operand),
    Field { base: String, field: String },
    Static { class: String, field: String },
    Concat(Vec<Operand>),
    Call(CallExpr),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Condition {
    Compare(RelOp, Operand, Operand),
    /// `if v goto L` branches when `v` is true.
    Test(Operand),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StmtKind {
    Assign {
        dst: String,
        value: Rvalue,
    },
    If {
        cond: Condition,
        target: String,
    },
    Goto(String),
    Throw {
        exception: String,
        message: Option<Vec<Operand>>,
    },
    Return(Option<Operand>),
    Call(CallExpr),
}

impl StmtKind {
    /// Statement kind name in the EXIR inventory.
    pub fn kind_name(&self) -> &'static str {
        match self {
            StmtKind::Assign { value, .. } => match value {
                Rvalue::Param(_) => "param-bind",
                Rvalue::Use(_) => "assign-const",
                Rvalue::Binary(..) => "assign-binop",
                Rvalue::Unary(..) => "assign-unop",
                Rvalue::Field { .. } | Rvalue::Static { .. } => "assign-fieldget",
                Rvalue::Concat(_) => "assign-strcat",
                Rvalue::Call(_) => "assign-call",
            },
            StmtKind::If { .. } => "if-goto",
            StmtKind::Goto(_) => "goto",
            StmtKind::Throw { .. } => "throw",
            StmtKind::Return(_) => "return",
            StmtKind::Call(_) => "call-void",
        }
    }

    pub fn call(&self) -> Option<&CallExpr> {
        match self {
            StmtKind::Assign {
                value: Rvalue::Call(c),
                ..
            } => Some(c),
            StmtKind::Call(c) => Some(c),
            _ => None,
        }
    }

    pub fn defined_var(&self) -> Option<&str> {
        match self {
            StmtKind::Assign { dst, .. } => Some(dst),
            _ => None,
        }
    }

    pub fn is_throw(&self) -> bool {
        matches!(self, StmtKind::Throw { .. })
    }

    /// Variables read by this statement.
    pub fn used_vars(&self) -> Vec<&str> {
        fn ops<'a>(out: &mut Vec<&'a str>, it: impl IntoIterator<Item = &'a Operand>) {
            out.extend(it.into_iter().filter_map(Operand::var));
        }
        fn call<'a>(out: &mut Vec<&'a str>, c: &'a CallExpr) {
            if let CallTarget::Virtual { receiver, .. } = &c.target {
                out.push(receiver);
            }
            ops(out, &c.args);
        }
        let mut out = Vec::new();
        match self {
            StmtKind::Assign { value, .. } => match value {
                Rvalue::Param(_) | Rvalue::Static { .. } => {}
                Rvalue::Use(a) | Rvalue::Unary(_, a) => ops(&mut out, [a]),
                Rvalue::Binary(_, a, b) => ops(&mut out, [a, b]),
                Rvalue::Field { base, .. } => out.push(base),
                Rvalue::Concat(parts) => ops(&mut out, parts),
                Rvalue::Call(c) => call(&mut out, c),
            },
            StmtKind::If { cond, .. } => match cond {
                Condition::Compare(_, a, b) => ops(&mut out, [a, b]),
                Condition::Test(a) => ops(&mut out, [a]),
            },
            StmtKind::Throw { message, .. } => {
                if let Some(parts) = message {
                    ops(&mut out, parts);
                }
            }
            StmtKind::Return(v) => ops(&mut out, v),
            StmtKind::Call(c) => call(&mut out, c),
            StmtKind::Goto(_) => {}
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Statement {
    pub labels: Vec<String>,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExirMethod {
    pub id: MethodId,
    pub public: bool,
    pub body: Vec<Statement>,
}

impl ExirMethod {
    /// Statement index carrying `label`.
    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.body
            .iter()
            .position(|s| s.labels.iter().any(|l| l == label))
    }

    /// Source indices of all `throw` statements, in order.
    pub fn throw_sites(&self) -> Vec<usize> {
        self.body
            .iter()
            .enumerate()
            .filter(|(_, s)| s.kind.is_throw())
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct StaticField {
    pub class: String,
    pub name: String,
    pub mutable: bool,
    pub init: Option<Const>,
}

/// One parsed and validated version of a code base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExirProgram {
    pub version: String,
    pub statics: Vec<StaticField>,
    pub methods: Vec<ExirMethod>,
}

impl ExirProgram {
    pub fn method(&self, id: &MethodId) -> Option<&ExirMethod> {
        self.methods.iter().find(|m| &m.id == id)
    }

    pub fn method_index(&self, id: &MethodId) -> Option<usize> {
        self.methods.iter().position(|m| &m.id == id)
    }

    /// Resolves a static call target to a method index; `None` means external.
    pub fn resolve_call(&self, call: &CallExpr) -> Option<usize> {
        match &call.target {
            CallTarget::Static { class, name } => {
                // ambiguous overloads are rejected by the parser
                self.methods.iter().position(|m| {
                    &m.id.class == class && &m.id.name == name && m.id.arity() == call.args.len()
                })
            }
            CallTarget::Virtual { .. } => None,
        }
    }

    pub fn static_field(&self, class: &str, name: &str) -> Option<&StaticField> {
        self.statics
            .iter()
            .find(|f| f.class == class && f.name == name)
    }

    /// Public methods, the APIs a summary report covers.
    pub fn apis(&self) -> impl Iterator<Item = &ExirMethod> {
        self.methods.iter().filter(|m| m.public)
    }

    pub fn by_id(&self) -> BTreeMap<&MethodId, &ExirMethod> {
        self.methods.iter().map(|m| (&m.id, m)).collect()
    }
}
