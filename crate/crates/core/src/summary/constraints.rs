//! Throw sites, control-dependence constraints along pre-paths, and their
//! refinement into parameter-rooted literals.

use crate::exir::{
    CallExpr, CallTarget, Condition, ExirMethod, ExirProgram, Operand, Rvalue, StmtKind,
};
use crate::graphs::{enumerate_prepaths, Cdg, Cfg, NodeId, PathLimits};

use super::expr::{normalize_literal, Callee, Expr, Normalized};
use super::precondition::{Clause, Literal};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThrowSite {
    pub stmt: usize,
    pub exception: String,
    pub message: Option<Vec<Operand>>,
}

/// Every `throw` statement of `method`, in source order.
pub fn locate_throws(method: &ExirMethod) -> Vec<ThrowSite> {
    method
        .body
        .iter()
        .enumerate()
        .filter_map(|(stmt, s)| match &s.kind {
            StmtKind::Throw { exception, message } => Some(ThrowSite {
                stmt,
                exception: exception.clone(),
                message: message.clone(),
            }),
            _ => None,
        })
        .collect()
}

/// A condition node on a pre-path and the branch the path takes there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CondStep {
    /// Position of the condition within the path.
    pub pos: usize,
    pub node: NodeId,
    pub taken: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathConstraint {
    pub path: Vec<NodeId>,
    /// Control-dependence ancestors of the site met along `path`, in path
    /// order.
    pub conditions: Vec<CondStep>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SiteConstraints {
    pub paths: Vec<PathConstraint>,
    pub truncated: bool,
    pub unreachable: bool,
}

/// For each pre-path of `site`, the conditions on it that `site` is
/// (transitively) control dependent on, with the branch taken.
pub fn extract_constraints(
    cfg: &Cfg,
    cdg: &Cdg,
    site: NodeId,
    limits: PathLimits,
) -> SiteConstraints {
    let ancestors = cdg.ancestors(site);
    let pre = enumerate_prepaths(cfg, site, limits);
    let paths = pre
        .paths
        .into_iter()
        .map(|path| {
            let conditions = path
                .windows(2)
                .enumerate()
                .filter(|(_, w)| cfg.is_condition(w[0]) && ancestors.contains(&w[0]))
                .map(|(pos, w)| CondStep {
                    pos,
                    node: w[0],
                    taken: cfg.true_succ(w[0]) == Some(w[1]),
                })
                .collect();
            PathConstraint { path, conditions }
        })
        .collect();
    SiteConstraints {
        paths,
        truncated: pre.truncated,
        unreachable: pre.unreachable,
    }
}

/// Resolves variables along one pre-path by their reaching definitions.
pub struct Refiner<'a> {
    program: &'a ExirProgram,
    method: &'a ExirMethod,
}

impl<'a> Refiner<'a> {
    pub fn new(program: &'a ExirProgram, method: &'a ExirMethod) -> Self {
        Refiner { program, method }
    }

    fn stmt(&self, path: &[NodeId], pos: usize) -> &'a StmtKind {
        &self.method.body[path[pos]].kind
    }

    /// Value of `var` just before the statement at `pos` executes.
    pub fn var_at(&self, path: &[NodeId], pos: usize, var: &str) -> Expr {
        (0..pos)
            .rev()
            .find_map(|j| match self.stmt(path, j) {
                StmtKind::Assign { dst, value } if dst == var => {
                    Some(self.rvalue_at(path, j, value))
                }
                _ => None,
            })
            .unwrap_or(Expr::Unknown)
    }

    pub fn operand_at(&self, path: &[NodeId], pos: usize, op: &Operand) -> Expr {
        match op {
            Operand::Var(v) => self.var_at(path, pos, v),
            Operand::Const(c) => Expr::Const(c.clone()),
        }
    }

    fn call_at(&self, path: &[NodeId], pos: usize, call: &CallExpr) -> Expr {
        let callee = match &call.target {
            CallTarget::Static { class, name } => Callee::Static {
                class: class.clone(),
                name: name.clone(),
            },
            CallTarget::Virtual { receiver, name } => Callee::Method {
                receiver: Box::new(self.var_at(path, pos, receiver)),
                name: name.clone(),
            },
        };
        Expr::Call {
            callee,
            args: self.args_at(path, pos, call),
        }
    }

    /// Argument values of `call` at `pos`.
    pub fn args_at(&self, path: &[NodeId], pos: usize, call: &CallExpr) -> Vec<Expr> {
        call.args
            .iter()
            .map(|a| self.operand_at(path, pos, a))
            .collect()
    }

    fn rvalue_at(&self, path: &[NodeId], pos: usize, rv: &Rvalue) -> Expr {
        let op = |o: &Operand| self.operand_at(path, pos, o);
        match rv {
            Rvalue::Param(k) => Expr::Param(*k),
            Rvalue::Use(a) => op(a),
            Rvalue::Binary(b, x, y) => Expr::binary(*b, op(x), op(y)),
            Rvalue::Unary(u, x) => Expr::unary(*u, op(x)),
            Rvalue::Field { base, field } => {
                Expr::Field(Box::new(self.var_at(path, pos, base)), field.clone())
            }
            Rvalue::Static { class, field } => match self.program.static_field(class, field) {
                Some(f) if f.mutable => Expr::Unknown,
                Some(f) if f.init.is_some() => Expr::Const(f.init.clone().expect("checked")),
                _ => Expr::Static {
                    class: class.clone(),
                    field: field.clone(),
                },
            },
            Rvalue::Concat(parts) => Expr::Concat(parts.iter().map(op).collect()),
            Rvalue::Call(c) => self.call_at(path, pos, c),
        }
    }

    /// The branch condition at `pos` as an expression that is true when the
    /// `goto` is taken.
    pub fn condition_at(&self, path: &[NodeId], pos: usize) -> Expr {
        match self.stmt(path, pos) {
            StmtKind::If { cond, .. } => match cond {
                Condition::Compare(rel, a, b) => Expr::binary(
                    crate::exir::BinOp::Rel(*rel),
                    self.operand_at(path, pos, a),
                    self.operand_at(path, pos, b),
                ),
                Condition::Test(a) => self.operand_at(path, pos, a),
            },
            other => panic!("statement `{other}` is not a condition"),
        }
    }

    /// Source text of the condition, before refinement.
    pub fn raw_condition(&self, node: NodeId) -> Literal {
        match &self.method.body[node].kind {
            StmtKind::If { cond, .. } => Literal::new(cond.to_string(), true),
            other => panic!("statement `{other}` is not a condition"),
        }
    }
}

/// Refines each condition of `pc` into a canonical literal over parameters,
/// constants and static fields. Variables with no definition on the path
/// become `unknown`.
pub fn refine_constraint(refiner: &Refiner<'_>, pc: &PathConstraint) -> Vec<Normalized> {
    pc.conditions
        .iter()
        .map(|c| normalize_literal(refiner.condition_at(&pc.path, c.pos), c.taken))
        .collect()
}

/// Conjunction of refined literals; `None` when a literal folds to false or
/// two literals contradict.
pub fn conjunction(lits: &[Normalized]) -> Option<Clause> {
    let mut clause = Clause::new();
    for l in lits {
        match l {
            Normalized::Const(true) => {}
            Normalized::Const(false) => return None,
            Normalized::Literal { atom, polarity } => {
                let lit = Literal::new(atom.clone(), *polarity);
                if clause.contains(&lit.negated()) {
                    return None;
                }
                clause.insert(lit);
            }
        }
    }
    Some(clause)
}

/// Raw per-path condition clause: source text of each condition and the
/// branch taken.
pub fn raw_clause(refiner: &Refiner<'_>, pc: &PathConstraint) -> Clause {
    pc.conditions
        .iter()
        .map(|c| {
            let mut l = refiner.raw_condition(c.node);
            l.polarity = c.taken;
            l
        })
        .collect()
}
