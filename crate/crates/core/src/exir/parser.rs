use std::collections::{BTreeMap, BTreeSet};

use super::lexer::{tokenize, Tok, Token};
use super::{
    BinOp, CallExpr, CallTarget, Condition, Const, ExirError, ExirMethod, ExirProgram, MethodId,
    Operand, RelOp, Rvalue, Statement, StaticField, StmtKind, UnOp,
};

const KEYWORDS: &[&str] = &[
    "param", "call", "static", "goto", "if", "throw", "return", "true", "false", "null", "method",
    "private", "public", "mut",
];

/// Parses and validates one EXIR program.
pub fn parse_program(text: &str, version_label: &str) -> Result<ExirProgram, ExirError> {
    let mut statics: Vec<StaticField> = Vec::new();
    let mut static_lines: Vec<usize> = Vec::new();
    let mut methods: Vec<ExirMethod> = Vec::new();
    let mut method_lines: Vec<usize> = Vec::new();
    let mut open: Option<OpenMethod> = None;

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let tokens = tokenize(line).map_err(|(col, message)| ExirError::Syntax {
            line: lineno,
            col,
            message,
        })?;
        if tokens.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(&tokens, lineno, line.chars().count());
        match open.as_mut() {
            None => {
                if cur.peek_ident() == Some("static") {
                    statics.push(parse_static(&mut cur)?);
                    static_lines.push(lineno);
                } else {
                    let (id, public) = parse_method_header(&mut cur)?;
                    open = Some(OpenMethod {
                        id,
                        public,
                        body: Vec::new(),
                        pending_labels: Vec::new(),
                    });
                    method_lines.push(lineno);
                }
            }
            Some(m) => {
                if cur.at_punct("}") {
                    cur.bump();
                    cur.expect_end()?;
                    let m = open.take().expect("open method");
                    methods.push(m.finish()?);
                    continue;
                }
                while cur.is_label() {
                    let label = cur.ident()?;
                    cur.expect_punct(":")?;
                    m.pending_labels.push(label);
                }
                if cur.at_end() {
                    continue;
                }
                let kind = parse_statement(&mut cur)?;
                cur.expect_end()?;
                m.body.push(Statement {
                    labels: std::mem::take(&mut m.pending_labels),
                    kind,
                });
            }
        }
    }
    if let Some(m) = open {
        return Err(ExirError::Syntax {
            line: text.lines().count(),
            col: 1,
            message: format!("method {} is missing its closing `}}`", m.id),
        });
    }

    let mut seen = BTreeSet::new();
    for (m, line) in methods.iter().zip(&method_lines) {
        if !seen.insert(&m.id) {
            return Err(ExirError::DuplicateMethod {
                line: *line,
                method: m.id.to_string(),
            });
        }
    }
    let mut fields = BTreeSet::new();
    for (f, line) in statics.iter().zip(&static_lines) {
        if !fields.insert((&f.class, &f.name)) {
            return Err(ExirError::DuplicateStatic {
                line: *line,
                field: format!("{}.{}", f.class, f.name),
            });
        }
    }
    check_calls(&methods)?;

    Ok(ExirProgram {
        version: version_label.to_string(),
        statics,
        methods,
    })
}

fn check_calls(methods: &[ExirMethod]) -> Result<(), ExirError> {
    let mut arities: BTreeMap<(&str, &str, usize), usize> = BTreeMap::new();
    for m in methods {
        *arities
            .entry((&m.id.class, &m.id.name, m.id.arity()))
            .or_default() += 1;
    }
    for m in methods {
        for stmt in &m.body {
            if let Some(CallExpr {
                target: CallTarget::Static { class, name },
                args,
            }) = stmt.kind.call()
            {
                if arities
                    .get(&(class.as_str(), name.as_str(), args.len()))
                    .copied()
                    .unwrap_or(0)
                    > 1
                {
                    return Err(ExirError::AmbiguousCall {
                        method: m.id.to_string(),
                        class: class.clone(),
                        name: name.clone(),
                        arity: args.len(),
                    });
                }
            }
        }
    }
    Ok(())
}

struct OpenMethod {
    id: MethodId,
    public: bool,
    body: Vec<Statement>,
    pending_labels: Vec<String>,
}

impl OpenMethod {
    fn finish(self) -> Result<ExirMethod, ExirError> {
        let name = self.id.to_string();
        if let Some(label) = self.pending_labels.into_iter().next() {
            return Err(ExirError::DanglingLabel {
                method: name,
                label,
            });
        }
        let mut labels = BTreeSet::new();
        let mut defined = BTreeSet::new();
        for stmt in &self.body {
            for l in &stmt.labels {
                if !labels.insert(l.as_str()) {
                    return Err(ExirError::DuplicateLabel {
                        method: name,
                        label: l.clone(),
                    });
                }
            }
            if let Some(v) = stmt.kind.defined_var() {
                defined.insert(v);
            }
        }
        for stmt in &self.body {
            let target = match &stmt.kind {
                StmtKind::If { target, .. } | StmtKind::Goto(target) => Some(target),
                _ => None,
            };
            if let Some(t) = target {
                if !labels.contains(t.as_str()) {
                    return Err(ExirError::UnresolvedLabel {
                        method: name,
                        label: t.clone(),
                    });
                }
            }
            if let StmtKind::Assign {
                value: Rvalue::Param(k),
                ..
            } = &stmt.kind
            {
                if *k >= self.id.arity() {
                    return Err(ExirError::ParamIndex {
                        method: name,
                        index: *k,
                        arity: self.id.arity(),
                    });
                }
            }
            if let Some(v) = stmt
                .kind
                .used_vars()
                .into_iter()
                .find(|v| !defined.contains(v))
            {
                return Err(ExirError::UndefinedVariable {
                    method: name,
                    var: v.to_string(),
                });
            }
        }
        Ok(ExirMethod {
            id: self.id,
            public: self.public,
            body: self.body,
        })
    }
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    line_len: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Token], line: usize, line_len: usize) -> Self {
        Cursor {
            toks,
            pos: 0,
            line,
            line_len,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ExirError> {
        let col = self
            .toks
            .get(self.pos)
            .map(|t| t.col)
            .unwrap_or(self.line_len + 1);
        Err(ExirError::Syntax {
            line: self.line,
            col,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, n: usize) -> Option<&'a Tok> {
        self.toks.get(self.pos + n).map(|t| &t.tok)
    }

    fn peek_ident(&self) -> Option<&'a str> {
        match self.peek() {
            Some(Tok::Ident(s)) => Some(s),
            _ => None,
        }
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn at_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn at_keyword(&self, kw: &str) -> bool {
        self.peek_ident() == Some(kw)
    }

    fn is_label(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()))
            && matches!(self.peek_at(1), Some(Tok::Punct(":")))
    }

    fn expect_end(&self) -> Result<(), ExirError> {
        if self.at_end() {
            Ok(())
        } else {
            self.err("unexpected trailing tokens")
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), ExirError> {
        if self.at_punct(p) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{p}`"))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ExirError> {
        if self.at_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{kw}`"))
        }
    }

    fn ident(&mut self) -> Result<String, ExirError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.bump();
                Ok(s.clone())
            }
            _ => self.err("expected identifier"),
        }
    }

    fn var(&mut self) -> Result<String, ExirError> {
        match self.peek_ident() {
            Some(s) if !KEYWORDS.contains(&s) => self.ident(),
            _ => self.err("expected variable name"),
        }
    }

    /// `a.b.c` as segments.
    fn dotted(&mut self) -> Result<Vec<String>, ExirError> {
        let mut parts = vec![self.ident()?];
        while self.at_punct(".") && matches!(self.peek_at(1), Some(Tok::Ident(_))) {
            self.bump();
            parts.push(self.ident()?);
        }
        Ok(parts)
    }
}

fn parse_static(cur: &mut Cursor) -> Result<StaticField, ExirError> {
    cur.expect_keyword("static")?;
    let mutable = if cur.at_keyword("mut") {
        cur.bump();
        true
    } else {
        false
    };
    let mut path = cur.dotted()?;
    if path.len() < 2 {
        return cur.err("static field must be written `Class.FIELD`");
    }
    let name = path.pop().expect("len >= 2");
    let init = if cur.at_punct("=") {
        cur.bump();
        Some(parse_const(cur)?)
    } else {
        None
    };
    cur.expect_end()?;
    Ok(StaticField {
        class: path.join("."),
        name,
        mutable,
        init,
    })
}

fn parse_type(cur: &mut Cursor) -> Result<String, ExirError> {
    let mut ty = cur.dotted()?.join(".");
    while cur.at_punct("[]") {
        cur.bump();
        ty.push_str("[]");
    }
    if cur.at_punct("...") {
        cur.bump();
        ty.push_str("...");
    }
    Ok(ty)
}

fn parse_method_header(cur: &mut Cursor) -> Result<(MethodId, bool), ExirError> {
    let public = match cur.peek_ident() {
        Some("private") => {
            cur.bump();
            false
        }
        Some("public") => {
            cur.bump();
            true
        }
        _ => true,
    };
    cur.expect_keyword("method")?;
    let class = cur.dotted()?.join(".");
    cur.expect_punct("::")?;
    let name = cur.ident()?;
    cur.expect_punct("(")?;
    let mut params = Vec::new();
    if !cur.at_punct(")") {
        loop {
            params.push(parse_type(cur)?);
            if cur.at_punct(",") {
                cur.bump();
            } else {
                break;
            }
        }
    }
    cur.expect_punct(")")?;
    cur.expect_punct("{")?;
    cur.expect_end()?;
    Ok((
        MethodId {
            class,
            name,
            params,
        },
        public,
    ))
}

fn parse_const(cur: &mut Cursor) -> Result<Const, ExirError> {
    let c = match cur.peek() {
        Some(Tok::Int(v)) => Const::Int(*v),
        Some(Tok::Str(s)) => Const::Str(s.clone()),
        Some(Tok::Ident(s)) if s == "true" => Const::Bool(true),
        Some(Tok::Ident(s)) if s == "false" => Const::Bool(false),
        Some(Tok::Ident(s)) if s == "null" => Const::Null,
        Some(Tok::Punct("-")) => match cur.peek_at(1) {
            Some(Tok::Int(v)) => {
                cur.bump();
                Const::Int(-v)
            }
            _ => return cur.err("expected constant"),
        },
        _ => return cur.err("expected constant"),
    };
    cur.bump();
    Ok(c)
}

fn at_const(cur: &Cursor) -> bool {
    match cur.peek() {
        Some(Tok::Int(_)) | Some(Tok::Str(_)) => true,
        Some(Tok::Ident(s)) => matches!(s.as_str(), "true" | "false" | "null"),
        Some(Tok::Punct("-")) => matches!(cur.peek_at(1), Some(Tok::Int(_))),
        _ => false,
    }
}

fn parse_operand(cur: &mut Cursor) -> Result<Operand, ExirError> {
    if at_const(cur) {
        Ok(Operand::Const(parse_const(cur)?))
    } else {
        Ok(Operand::Var(cur.var()?))
    }
}

fn parse_call(cur: &mut Cursor) -> Result<CallExpr, ExirError> {
    let path = cur.dotted()?;
    let target = if cur.at_punct("::") {
        cur.bump();
        CallTarget::Static {
            class: path.join("."),
            name: cur.ident()?,
        }
    } else if path.len() == 2 && !KEYWORDS.contains(&path[0].as_str()) {
        CallTarget::Virtual {
            receiver: path[0].clone(),
            name: path[1].clone(),
        }
    } else {
        return cur.err("expected `Class::method(..)` or `receiver.method(..)`");
    };
    cur.expect_punct("(")?;
    let mut args = Vec::new();
    if !cur.at_punct(")") {
        loop {
            args.push(parse_operand(cur)?);
            if cur.at_punct(",") {
                cur.bump();
            } else {
                break;
            }
        }
    }
    cur.expect_punct(")")?;
    Ok(CallExpr { target, args })
}

fn parse_concat_tail(cur: &mut Cursor, first: Operand) -> Result<Vec<Operand>, ExirError> {
    let mut parts = vec![first];
    while cur.at_punct("++") {
        cur.bump();
        parts.push(parse_operand(cur)?);
    }
    Ok(parts)
}

fn relop(cur: &Cursor) -> Option<RelOp> {
    match cur.peek() {
        Some(Tok::Punct(p)) => match BinOp::from_symbol(p) {
            Some(BinOp::Rel(r)) => Some(r),
            _ => None,
        },
        _ => None,
    }
}

fn parse_rvalue(cur: &mut Cursor) -> Result<Rvalue, ExirError> {
    if cur.at_keyword("param") {
        cur.bump();
        return match cur.peek() {
            Some(Tok::Int(k)) if *k >= 0 => {
                let k = *k as usize;
                cur.bump();
                Ok(Rvalue::Param(k))
            }
            _ => cur.err("expected parameter index"),
        };
    }
    if cur.at_keyword("static") {
        cur.bump();
        let mut path = cur.dotted()?;
        if path.len() < 2 {
            return cur.err("static field must be written `Class.FIELD`");
        }
        let field = path.pop().expect("len >= 2");
        return Ok(Rvalue::Static {
            class: path.join("."),
            field,
        });
    }
    if cur.at_keyword("call") {
        cur.bump();
        return Ok(Rvalue::Call(parse_call(cur)?));
    }
    if cur.at_punct("!") {
        cur.bump();
        return Ok(Rvalue::Unary(UnOp::Not, parse_operand(cur)?));
    }
    if cur.at_punct("-") && !at_const(cur) {
        cur.bump();
        return Ok(Rvalue::Unary(UnOp::Neg, parse_operand(cur)?));
    }
    let lhs = parse_operand(cur)?;
    if cur.at_punct(".") {
        let base = match lhs {
            Operand::Var(v) => v,
            Operand::Const(_) => return cur.err("field access needs a variable base"),
        };
        cur.bump();
        let field = cur.ident()?;
        return Ok(Rvalue::Field { base, field });
    }
    if cur.at_punct("++") {
        return Ok(Rvalue::Concat(parse_concat_tail(cur, lhs)?));
    }
    if let Some(Tok::Punct(p)) = cur.peek() {
        if let Some(op) = BinOp::from_symbol(p) {
            cur.bump();
            let rhs = parse_operand(cur)?;
            return Ok(Rvalue::Binary(op, lhs, rhs));
        }
    }
    Ok(Rvalue::Use(lhs))
}

fn parse_statement(cur: &mut Cursor) -> Result<StmtKind, ExirError> {
    match cur.peek_ident() {
        Some("goto") => {
            cur.bump();
            Ok(StmtKind::Goto(cur.ident()?))
        }
        Some("if") => {
            cur.bump();
            let lhs = parse_operand(cur)?;
            let cond = match relop(cur) {
                Some(op) => {
                    cur.bump();
                    Condition::Compare(op, lhs, parse_operand(cur)?)
                }
                None => Condition::Test(lhs),
            };
            cur.expect_keyword("goto")?;
            Ok(StmtKind::If {
                cond,
                target: cur.ident()?,
            })
        }
        Some("throw") => {
            cur.bump();
            let exception = cur.dotted()?.join(".");
            let message = if cur.at_end() {
                None
            } else {
                let first = parse_operand(cur)?;
                Some(parse_concat_tail(cur, first)?)
            };
            Ok(StmtKind::Throw { exception, message })
        }
        Some("return") => {
            cur.bump();
            if cur.at_end() {
                Ok(StmtKind::Return(None))
            } else {
                Ok(StmtKind::Return(Some(parse_operand(cur)?)))
            }
        }
        Some("call") => {
            cur.bump();
            Ok(StmtKind::Call(parse_call(cur)?))
        }
        _ => {
            let dst = cur.var()?;
            cur.expect_punct(":=")?;
            let value = parse_rvalue(cur)?;
            Ok(StmtKind::Assign { dst, value })
        }
    }
}
