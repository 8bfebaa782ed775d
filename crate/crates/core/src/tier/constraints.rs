use std::collections::BTreeMap;
use std::fmt;

use crate::ast::*;
use crate::ops::Registry;
use crate::span::Span;

use super::restricted::Signature;
use super::{Delta, Mode, Tier};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TVar(pub u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarOrigin {
    Gamma(String),
    Expr(Span),
    Stmt(Span),
    Guard(Span),
    Body,
    KIn,
    KOut,
}

impl fmt::Display for VarOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarOrigin::Gamma(x) => write!(f, "tier of `{x}`"),
            VarOrigin::Expr(s) => write!(f, "expression at {s}"),
            VarOrigin::Stmt(s) => write!(f, "statement at {s}"),
            VarOrigin::Guard(s) => write!(f, "loop guard at {s}"),
            VarOrigin::Body => write!(f, "body tier"),
            VarOrigin::KIn => write!(f, "innermost tier"),
            VarOrigin::KOut => write!(f, "outermost tier"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Atom {
    /// `a + offset <= b`
    Le { a: TVar, b: TVar, offset: Tier },
    /// `a = 0`
    Zero(TVar),
    /// `1 <= a`
    AtLeastOne(TVar),
    /// `a = c`
    Fix(TVar, Tier),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopRecord {
    pub span: Span,
    pub rule: Mode,
    pub guard: TVar,
}

/// An operator occurrence typed from a finite signature table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpChoice {
    pub span: Span,
    pub k_in: TVar,
    pub args: Vec<TVar>,
    pub node: TVar,
    pub options: Vec<Signature>,
}

#[derive(Clone, Debug)]
pub struct ConstraintSet {
    pub mode: Mode,
    pub origins: Vec<VarOrigin>,
    pub atoms: Vec<Atom>,
    pub gamma: BTreeMap<String, TVar>,
    pub k: TVar,
    pub k_in: TVar,
    pub k_out: TVar,
    pub loops: Vec<LoopRecord>,
    pub choices: Vec<OpChoice>,
}

impl ConstraintSet {
    pub fn var_count(&self) -> usize {
        self.origins.len()
    }

    pub fn describe(&self, v: TVar) -> String {
        self.origins[v.0 as usize].to_string()
    }
}

#[derive(Clone, Copy)]
struct Ctx {
    k_in: TVar,
    k_out: TVar,
    depth: usize,
}

struct Gen<'a> {
    cs: ConstraintSet,
    registry: &'a Registry,
    delta: &'a Delta,
}

impl Gen<'_> {
    fn var(&mut self, origin: VarOrigin) -> TVar {
        self.cs.origins.push(origin);
        TVar(self.cs.origins.len() as u32 - 1)
    }

    fn le(&mut self, a: TVar, b: TVar) {
        self.cs.atoms.push(Atom::Le { a, b, offset: 0 });
    }

    fn lt(&mut self, a: TVar, b: TVar) {
        self.cs.atoms.push(Atom::Le { a, b, offset: 1 });
    }

    fn eq(&mut self, a: TVar, b: TVar) {
        self.le(a, b);
        self.le(b, a);
    }

    fn gamma(&mut self, x: &Ident) -> TVar {
        if let Some(v) = self.cs.gamma.get(&x.name) {
            return *v;
        }
        let v = self.var(VarOrigin::Gamma(x.name.clone()));
        self.cs.gamma.insert(x.name.clone(), v);
        v
    }

    fn expr(&mut self, e: &Expr, ctx: Ctx) -> TVar {
        let t = self.var(VarOrigin::Expr(e.span));
        match &e.kind {
            ExprKind::Var(x) => {
                let g = self.gamma(x);
                self.eq(t, g);
            }
            ExprKind::Const(_) => {}
            ExprKind::Op { op, args } => {
                let arg_vars: Vec<TVar> = args.iter().map(|a| self.expr(a, ctx)).collect();
                let table = match self.delta {
                    Delta::Restricted(r) => r.signatures(&op.name),
                    Delta::Maximal => None,
                };
                if let Some(options) = table {
                    self.cs.choices.push(OpChoice {
                        span: e.span,
                        k_in: ctx.k_in,
                        args: arg_vars,
                        node: t,
                        options: options.to_vec(),
                    });
                } else if !arg_vars.is_empty() {
                    for a in &arg_vars {
                        self.le(t, *a);
                        self.le(*a, ctx.k_in);
                    }
                    if self.registry.get(&op.name).is_some_and(|i| i.is_positive()) {
                        self.lt(t, ctx.k_in);
                    }
                }
            }
            ExprKind::Oracle { data, bound, .. } => {
                let d = self.expr(data, ctx);
                let b = self.expr(bound, ctx);
                self.eq(d, t);
                self.eq(b, ctx.k_out);
                self.lt(t, ctx.k_in);
                self.le(t, ctx.k_out);
            }
        }
        t
    }

    fn stmt(&mut self, st: &Stmt, ctx: Ctx) -> TVar {
        match &st.kind {
            StmtKind::Skip => self.var(VarOrigin::Stmt(st.span)),
            StmtKind::Assign { target, value } => {
                let s = self.var(VarOrigin::Stmt(st.span));
                let te = self.expr(value, ctx);
                let g = self.gamma(target);
                self.le(g, te);
                self.le(g, s);
                s
            }
            StmtKind::Seq(a, b) => {
                let s = self.var(VarOrigin::Stmt(st.span));
                let sa = self.stmt(a, ctx);
                let sb = self.stmt(b, ctx);
                self.le(sa, s);
                self.le(sb, s);
                s
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                let s = self.var(VarOrigin::Stmt(st.span));
                let g = self.expr(cond, ctx);
                let s1 = self.stmt(then_branch, ctx);
                let s0 = self.stmt(else_branch, ctx);
                self.le(s1, g);
                self.le(s0, g);
                self.le(g, s);
                s
            }
            StmtKind::While { cond, body } => {
                let s = self.var(VarOrigin::Stmt(st.span));
                let k = self.var(VarOrigin::Guard(cond.span));
                let winit = self.cs.mode == Mode::Winit && ctx.depth == 0;
                let (guard_ctx, body_ctx) = if winit {
                    (Ctx { k_in: ctx.k_in, k_out: k, depth: 1 }, Ctx { k_in: k, k_out: k, depth: 1 })
                } else {
                    self.le(k, ctx.k_out);
                    (Ctx { depth: ctx.depth + 1, ..ctx }, Ctx { k_in: k, k_out: ctx.k_out, depth: ctx.depth + 1 })
                };
                self.cs.atoms.push(Atom::AtLeastOne(k));
                let g = self.expr(cond, guard_ctx);
                self.eq(g, k);
                let sb = self.stmt(body, body_ctx);
                self.le(sb, k);
                self.le(k, s);
                self.cs.loops.push(LoopRecord {
                    span: st.span,
                    rule: if winit { Mode::Winit } else { Mode::Wh },
                    guard: k,
                });
                s
            }
        }
    }
}

/// Constraints for the maximal operator environment.
pub fn gen_constraints(proc: &Procedure, registry: &Registry, mode: Mode) -> ConstraintSet {
    gen_constraints_with(proc, registry, mode, &Delta::Maximal)
}

pub fn gen_constraints_with(proc: &Procedure, registry: &Registry, mode: Mode, delta: &Delta) -> ConstraintSet {
    let cs = ConstraintSet {
        mode,
        origins: vec![VarOrigin::Body, VarOrigin::KIn, VarOrigin::KOut],
        atoms: Vec::new(),
        gamma: BTreeMap::new(),
        k: TVar(0),
        k_in: TVar(1),
        k_out: TVar(2),
        loops: Vec::new(),
        choices: Vec::new(),
    };
    let mut g = Gen { cs, registry, delta };
    for x in proc.word_vars() {
        g.gamma(x);
    }
    if mode == Mode::Winit {
        g.cs.atoms.push(Atom::Zero(TVar(2)));
    }
    let ctx = Ctx { k_in: TVar(1), k_out: TVar(2), depth: 0 };
    let s = g.stmt(&proc.body, ctx);
    g.le(s, TVar(0));
    g.cs
}
