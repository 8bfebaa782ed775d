//! Size-change analysis of while loops: flattening, size-change graphs,
//! trace summaries and the per-loop down-thread check.

pub mod dot;
mod flatten;
mod scg;
mod summary;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

pub use flatten::{flatten, flatten_avoiding, is_flat};
pub use scg::{scg_of_assignment, Scg, ScgEdge};
pub use summary::{Origin, TraceSummary, VarSet, VariableSetMismatch};

use crate::ast::*;
use crate::ops::{OpsError, Registry};
use crate::span::Span;

/// Variables occurring in some while guard of `proc`, in order of first
/// occurrence.
pub fn guard_vars(proc: &Procedure) -> Arc<VarSet> {
    let mut names = Vec::new();
    proc.body.visit(&mut |s| {
        if let StmtKind::While { cond, .. } = &s.kind {
            for x in cond.vars() {
                if x.kind() == VarKind::Word {
                    names.push(x.name.clone());
                }
            }
        }
    });
    VarSet::new(names)
}

/// Summary of every SCG word of a flat statement: sequences compose,
/// branches unite, loops iterate.
pub fn summarize(st: &Stmt, vars: &Arc<VarSet>, registry: &Registry) -> Result<TraceSummary, OpsError> {
    Ok(match &st.kind {
        StmtKind::Skip => TraceSummary::identity(vars),
        StmtKind::Assign { target, value } => scg_of_assignment(target, value, vars, registry)?.summary(),
        StmtKind::Seq(a, b) => summarize(a, vars, registry)?.compose(&summarize(b, vars, registry)?).unwrap(),
        StmtKind::If { then_branch, else_branch, .. } => {
            summarize(then_branch, vars, registry)?.union(&summarize(else_branch, vars, registry)?).unwrap()
        }
        StmtKind::While { body, .. } => summarize(body, vars, registry)?.star(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ScpReason {
    /// The guard is not `x != ~`.
    NonCanonicalGuard,
    /// Some trace of the guard variable has no non-increasing path to the loop start.
    BrokenTrace,
    /// Some trace of the guard variable reaches another variable.
    ForeignOrigin(String),
    /// Some trace of the guard variable has no strict decrease.
    NoStrictDecrease,
}

impl fmt::Display for ScpReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScpReason::NonCanonicalGuard => write!(f, "non-canonical guard (expected `x != ~`)"),
            ScpReason::BrokenTrace => write!(f, "missing down-thread: broken trace"),
            ScpReason::ForeignOrigin(v) => write!(f, "missing down-thread: trace starts at `{v}`"),
            ScpReason::NoStrictDecrease => write!(f, "missing down-thread: no strict decrease"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopVerdict {
    pub procedure: String,
    pub span: Span,
    pub guard_var: Option<String>,
    pub accepted: bool,
    pub reason: Option<ScpReason>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScpReport {
    pub loops: Vec<LoopVerdict>,
}

impl ScpReport {
    pub fn accepted(&self) -> bool {
        self.loops.iter().all(|l| l.accepted)
    }
}

/// The guard variable of `x != ~`, or `None`.
pub fn canonical_guard(cond: &Expr) -> Option<&Ident> {
    match &cond.kind {
        ExprKind::Op { op, args } if op.name == "neq" && args.len() == 2 && args[1].is_eps() => match &args[0].kind {
            ExprKind::Var(x) => Some(x),
            _ => None,
        },
        _ => None,
    }
}

/// Acceptance of a loop on `x` whose body has summary `s`: every trace of
/// `x` must come from `x` and decrease strictly.
pub fn loop_reason(s: &TraceSummary, x: &str) -> Option<ScpReason> {
    let vars = s.vars();
    let xi = vars.index(x).expect("guard variable in the variable set");
    let origins = s.origins(xi);
    if origins.contains(&Origin::Broken) {
        return Some(ScpReason::BrokenTrace);
    }
    if let Some(Origin::From { var, .. }) = origins.iter().find(|o| !matches!(o, Origin::From { var, .. } if *var == xi)) {
        return Some(ScpReason::ForeignOrigin(vars.name(*var).to_string()));
    }
    if origins.contains(&Origin::From { var: xi, down: false }) {
        return Some(ScpReason::NoStrictDecrease);
    }
    None
}

fn check_stmt(
    st: &Stmt,
    proc: &str,
    vars: &Arc<VarSet>,
    registry: &Registry,
    out: &mut Vec<LoopVerdict>,
) -> Result<TraceSummary, OpsError> {
    Ok(match &st.kind {
        StmtKind::Skip | StmtKind::Assign { .. } => summarize(st, vars, registry)?,
        StmtKind::Seq(a, b) => {
            let sa = check_stmt(a, proc, vars, registry, out)?;
            sa.compose(&check_stmt(b, proc, vars, registry, out)?).unwrap()
        }
        StmtKind::If { then_branch, else_branch, .. } => {
            let s1 = check_stmt(then_branch, proc, vars, registry, out)?;
            s1.union(&check_stmt(else_branch, proc, vars, registry, out)?).unwrap()
        }
        StmtKind::While { cond, body } => {
            let slot = out.len();
            out.push(LoopVerdict { procedure: proc.to_string(), span: st.span, guard_var: None, accepted: false, reason: None });
            let sb = check_stmt(body, proc, vars, registry, out)?;
            let v = &mut out[slot];
            match canonical_guard(cond) {
                None => v.reason = Some(ScpReason::NonCanonicalGuard),
                Some(x) => {
                    v.guard_var = Some(x.name.clone());
                    v.reason = loop_reason(&sb, &x.name);
                    v.accepted = v.reason.is_none();
                }
            }
            sb.star()
        }
    })
}

/// Loop verdicts of one procedure, in source order.
pub fn check_procedure(proc: &Procedure, registry: &Registry) -> Result<Vec<LoopVerdict>, OpsError> {
    check_flat_procedure(&flatten(proc), &guard_vars(proc), registry)
}

fn check_flat_procedure(flat: &Procedure, vars: &Arc<VarSet>, registry: &Registry) -> Result<Vec<LoopVerdict>, OpsError> {
    let mut out = Vec::new();
    check_stmt(&flat.body, &flat.name.name, vars, registry, &mut out)?;
    Ok(out)
}

/// Checks every loop of every procedure.
pub fn check_scps(prg: &Program, registry: &Registry) -> Result<ScpReport, OpsError> {
    let avoid: BTreeSet<String> = program_names(prg);
    let mut loops = Vec::new();
    for p in prg.procedures() {
        let flat = flatten_avoiding(p, &avoid);
        loops.extend(check_flat_procedure(&flat, &guard_vars(p), registry)?);
    }
    Ok(ScpReport { loops })
}

/// Every variable name mentioned anywhere in the program.
pub fn program_names(prg: &Program) -> BTreeSet<String> {
    let mut names: BTreeSet<String> = prg.boxed_vars().into_iter().map(|x| x.name.clone()).collect();
    for p in prg.procedures() {
        names.extend(p.word_vars().chain(&p.oracle_params).map(|x| x.name.clone()));
    }
    for t in prg.terms() {
        for n in crate::simple_types::term_nodes(t) {
            match &n.kind {
                TermKind::Var(x) | TermKind::Lambda(x, _) => {
                    names.insert(x.name.clone());
                }
                TermKind::Call { closures, .. } => names.extend(closures.iter().map(|c| c.param.name.clone())),
                TermKind::App(..) => {}
            }
        }
    }
    names
}

/// The assignment graphs met along one pass through `st`: first branch of
/// each conditional, each inner loop body once.
pub fn unrolled_graphs(st: &Stmt, vars: &Arc<VarSet>, registry: &Registry) -> Result<Vec<Scg>, OpsError> {
    let mut out = Vec::new();
    fn go(st: &Stmt, vars: &Arc<VarSet>, registry: &Registry, out: &mut Vec<Scg>) -> Result<(), OpsError> {
        match &st.kind {
            StmtKind::Skip => {}
            StmtKind::Assign { target, value } => out.push(scg_of_assignment(target, value, vars, registry)?),
            StmtKind::Seq(a, b) => {
                go(a, vars, registry, out)?;
                go(b, vars, registry, out)?;
            }
            StmtKind::If { then_branch, .. } => go(then_branch, vars, registry, out)?,
            StmtKind::While { body, .. } => go(body, vars, registry, out)?,
        }
        Ok(())
    }
    go(st, vars, registry, &mut out)?;
    Ok(out)
}
