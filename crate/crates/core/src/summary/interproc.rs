//! Bottom-up summary construction over the call graph.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::callgraph::{build_call_graph, CallGraph};
use crate::exir::{ExirProgram, StmtKind};
use crate::graphs::{build_cfg_with, control_dependence};

use super::constraints::{
    conjunction, extract_constraints, raw_clause, refine_constraint, Refiner,
};
use super::expr::{normalize_literal, parse_expr, Expr, Normalized};
use super::message::reconstruct_message;
use super::precondition::{negate_precondition, Clause, Literal, Precondition};
use super::report::{
    flags, ApiSummaries, ExceptionSummary, ExtractOptions, Mode, Origin, SummaryReport,
};

/// Summaries of every method (by program index) and how often each method
/// was analyzed.
#[derive(Debug, Clone)]
pub struct Propagation {
    pub summaries: Vec<Vec<ExceptionSummary>>,
    pub visits: Vec<usize>,
}

/// Rewrites a callee precondition into caller terms by substituting the
/// call's argument values for `parameterK`.
fn lift(p: &Precondition, args: &[Expr]) -> Precondition {
    let clauses = p.clauses.iter().filter_map(|c| {
        let lits: Vec<Normalized> = c
            .iter()
            .map(|l| {
                let e = parse_expr(&l.atom).unwrap_or(Expr::Unknown);
                normalize_literal(e.substitute(args), l.polarity)
            })
            .collect();
        conjunction(&lits)
    });
    let mut out = Precondition::from_clauses(clauses);
    out.truncated = p.truncated;
    out.clause_limit_hit = p.clause_limit_hit;
    out
}

fn mentions_unknown(p: &Precondition) -> bool {
    p.clauses.iter().flatten().any(|l| {
        parse_expr(&l.atom)
            .map(|e| e.contains_unknown())
            .unwrap_or(true)
    })
}

/// Flags a callee summary passes on to the callers it is lifted into.
const INHERITED: [&str; 4] = [
    flags::IMPRECISE,
    flags::RECURSIVE_APPROX,
    flags::UNREACHABLE,
    flags::TRUNCATED,
];

fn finish(mut s: ExceptionSummary, recursive: bool, unreachable: bool) -> ExceptionSummary {
    let p = &s.precondition;
    let mut f: Vec<&str> = Vec::new();
    if p.truncated {
        f.push(flags::TRUNCATED);
    }
    if p.clause_limit_hit {
        f.push(flags::CLAUSE_LIMIT_HIT);
    }
    if p.is_true() {
        f.push(flags::UNCONDITIONAL);
    }
    if p.is_false() {
        f.push(flags::INFEASIBLE);
    }
    if mentions_unknown(p) {
        f.push(flags::IMPRECISE);
    }
    if recursive {
        f.push(flags::RECURSIVE_APPROX);
    }
    if unreachable {
        f.push(flags::UNREACHABLE);
    }
    s.flags.extend(f.into_iter().map(String::from));
    s
}

/// What one pre-path of a site contributes before the site itself.
struct PathContext {
    /// Guards of the site (cons2) and negated earlier callee exceptions
    /// (cons3).
    pre: Precondition,
    /// Innermost guard literal; `None` when it folds to false.
    key: Option<Clause>,
    /// Call arguments at the site, for call sites.
    args: Vec<Expr>,
}

fn key_clause(lits: &[Normalized]) -> Option<Clause> {
    match lits.last() {
        None | Some(Normalized::Const(true)) => Some(Clause::new()),
        Some(Normalized::Const(false)) => None,
        Some(Normalized::Literal { atom, polarity }) => {
            Some(Clause::from([Literal::new(atom.clone(), *polarity)]))
        }
    }
}

fn analyze_method<'a>(
    program: &ExirProgram,
    cg: &CallGraph,
    opts: &ExtractOptions,
    m: usize,
    lookup: &dyn Fn(usize) -> &'a [ExceptionSummary],
) -> Vec<ExceptionSummary> {
    let method = &program.methods[m];
    let inter = opts.mode == Mode::Inter;
    let limit = opts.limits.clause_limit;

    let mut recursive = false;
    let mut callee_of: Vec<Option<usize>> = vec![None; method.body.len()];
    if inter {
        for (i, s) in method.body.iter().enumerate() {
            if let Some(c) = s.kind.call().and_then(|call| program.resolve_call(call)) {
                if cg.is_back_edge(m, c) {
                    recursive = true;
                } else if !lookup(c).is_empty() {
                    callee_of[i] = Some(c);
                }
            }
        }
    }

    let cfg = build_cfg_with(method, |i| callee_of[i].is_some());
    let cdg = control_dependence(&cfg);
    let refiner = Refiner::new(program, method);
    let mut out = Vec::new();

    for site in 0..method.body.len() {
        let is_throw = method.body[site].kind.is_throw();
        if !is_throw && callee_of[site].is_none() {
            continue;
        }
        let sc = extract_constraints(&cfg, &cdg, site, opts.limits.paths());
        let mut raw = BTreeSet::new();
        let contexts: Vec<PathContext> = sc
            .paths
            .iter()
            .map(|pc| {
                let lits = refine_constraint(&refiner, pc);
                raw.insert(raw_clause(&refiner, pc));
                let mut pre = match conjunction(&lits) {
                    Some(c) => Precondition::from_clauses([c]),
                    None => Precondition::falsity(),
                };
                let last = pc.path.len() - 1;
                for (pos, &node) in pc.path[..last].iter().enumerate() {
                    if pre.is_false() {
                        break;
                    }
                    if let Some(c) = callee_of[node] {
                        let call = method.body[node].kind.call().expect("call statement");
                        let args = refiner.args_at(&pc.path, pos, call);
                        for s in lookup(c) {
                            let neg = negate_precondition(&lift(&s.precondition, &args), limit);
                            pre = pre.and(&neg, limit);
                        }
                    }
                }
                let args = match method.body[site].kind.call() {
                    Some(call) if !is_throw => refiner.args_at(&pc.path, last, call),
                    _ => Vec::new(),
                };
                PathContext {
                    pre,
                    key: key_clause(&lits),
                    args,
                }
            })
            .collect();

        if is_throw {
            let mut pre = Precondition::falsity();
            let mut key = Precondition::falsity();
            let mut dropped = 0;
            for ctx in &contexts {
                if ctx.pre.is_false() {
                    dropped += 1;
                    continue;
                }
                pre = pre.or(&ctx.pre);
                if let Some(k) = &ctx.key {
                    key = key.or(&Precondition::from_clauses([k.clone()]));
                }
            }
            pre.truncated |= sc.truncated;
            let StmtKind::Throw { exception, .. } = &method.body[site].kind else {
                unreachable!("checked is_throw")
            };
            let s = ExceptionSummary {
                exception_type: exception.clone(),
                message_pattern: reconstruct_message(method, site),
                condition: raw.clone(),
                precondition: pre,
                key_precondition: key,
                origin: Origin {
                    method: method.id.to_string(),
                    stmt: site,
                },
                call_chain: Vec::new(),
                flags: BTreeSet::new(),
                dropped_paths: dropped,
            };
            out.push(finish(s, recursive, sc.unreachable));
        } else {
            let c = callee_of[site].expect("call site");
            let callee_id = program.methods[c].id.to_string();
            for s in lookup(c) {
                let mut pre = Precondition::falsity();
                let mut key = Precondition::falsity();
                let mut dropped = 0;
                for ctx in &contexts {
                    let path_pre = if ctx.pre.is_false() {
                        ctx.pre.clone()
                    } else {
                        ctx.pre.and(&lift(&s.precondition, &ctx.args), limit)
                    };
                    if path_pre.is_false() {
                        dropped += 1;
                        continue;
                    }
                    pre = pre.or(&path_pre);
                    if s.key_precondition.is_true() {
                        if let Some(k) = &ctx.key {
                            key = key.or(&Precondition::from_clauses([k.clone()]));
                        }
                    } else {
                        key = key.or(&lift(&s.key_precondition, &ctx.args));
                    }
                }
                pre.truncated |= sc.truncated;
                let mut call_chain = vec![method.id.to_string()];
                if s.call_chain.is_empty() {
                    call_chain.push(callee_id.clone());
                } else {
                    call_chain.extend(s.call_chain.iter().cloned());
                }
                let lifted = ExceptionSummary {
                    exception_type: s.exception_type.clone(),
                    message_pattern: s.message_pattern.clone(),
                    condition: s.condition.clone(),
                    precondition: pre,
                    key_precondition: key,
                    origin: s.origin.clone(),
                    call_chain,
                    flags: INHERITED
                        .iter()
                        .filter(|f| s.has_flag(f))
                        .map(|f| f.to_string())
                        .collect(),
                    dropped_paths: dropped,
                };
                out.push(finish(lifted, recursive, sc.unreachable));
            }
        }
    }
    out.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    out
}

/// Analyzes every method once, callees before callers. Components of one
/// call-graph wave are independent and run in parallel when
/// `opts.parallel` is set; the result does not depend on it.
pub fn propagate_interprocedural(
    program: &ExirProgram,
    cg: &CallGraph,
    opts: &ExtractOptions,
) -> Propagation {
    let n = program.methods.len();
    let mut done: Vec<Option<Vec<ExceptionSummary>>> = vec![None; n];
    let mut visits = vec![0; n];
    for wave in cg.waves() {
        let finished = &done;
        let run = |scc: &usize| {
            let mut local: Vec<(usize, Vec<ExceptionSummary>)> = Vec::new();
            for &m in &cg.order[*scc].members {
                let result = {
                    let lookup = |c: usize| -> &[ExceptionSummary] {
                        local
                            .iter()
                            .find(|(k, _)| *k == c)
                            .map(|(_, s)| s.as_slice())
                            .or_else(|| finished[c].as_deref())
                            .expect("callees are analyzed first")
                    };
                    analyze_method(program, cg, opts, m, &lookup)
                };
                local.push((m, result));
            }
            local
        };
        let results: Vec<Vec<(usize, Vec<ExceptionSummary>)>> = if opts.parallel {
            wave.par_iter().map(run).collect()
        } else {
            wave.iter().map(run).collect()
        };
        for (m, s) in results.into_iter().flatten() {
            visits[m] += 1;
            done[m] = Some(s);
        }
    }
    Propagation {
        summaries: done.into_iter().map(Option::unwrap_or_default).collect(),
        visits,
    }
}

/// Summary report of every public method of `program`.
pub fn extract_summaries(program: &ExirProgram, opts: &ExtractOptions) -> SummaryReport {
    let cg = build_call_graph(program);
    let prop = propagate_interprocedural(program, &cg, opts);
    let mut apis: Vec<ApiSummaries> = program
        .methods
        .iter()
        .zip(prop.summaries)
        .filter(|(m, _)| m.public)
        .map(|(m, summaries)| ApiSummaries {
            id: m.id.clone(),
            summaries,
        })
        .collect();
    apis.sort_by(|a, b| a.id.cmp(&b.id));
    SummaryReport {
        version: program.version.clone(),
        mode: opts.mode,
        limits: opts.limits,
        apis,
    }
}
