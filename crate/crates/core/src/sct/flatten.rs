use std::collections::BTreeSet;

use crate::ast::*;

struct Flattener<'a> {
    avoid: &'a BTreeSet<String>,
    next: usize,
    temps: Vec<Ident>,
}

impl Flattener<'_> {
    fn fresh(&mut self) -> Ident {
        loop {
            self.next += 1;
            let name = format!("t{}", self.next);
            if !self.avoid.contains(&name) {
                let id = Ident::new(name);
                self.temps.push(id.clone());
                return id;
            }
        }
    }

    /// Rewrites `e` so its arguments are atomic, emitting assignments for
    /// nested subexpressions into `out`.
    fn shallow(&mut self, e: &Expr, out: &mut Vec<Stmt>) -> Expr {
        let kind = match &e.kind {
            ExprKind::Var(_) | ExprKind::Const(_) => return e.clone(),
            ExprKind::Op { op, args } => {
                ExprKind::Op { op: op.clone(), args: args.iter().map(|a| self.atom(a, out)).collect() }
            }
            ExprKind::Oracle { oracle, data, bound } => ExprKind::Oracle {
                oracle: oracle.clone(),
                data: Box::new(self.atom(data, out)),
                bound: Box::new(self.atom(bound, out)),
            },
        };
        Expr { kind, span: e.span }
    }

    fn atom(&mut self, e: &Expr, out: &mut Vec<Stmt>) -> Expr {
        if e.is_atomic() {
            return e.clone();
        }
        let value = self.shallow(e, out);
        let t = self.fresh();
        out.push(Stmt { kind: StmtKind::Assign { target: t.clone(), value }, span: e.span });
        Expr { kind: ExprKind::Var(t), span: e.span }
    }

    fn stmt(&mut self, s: &Stmt) -> Stmt {
        let kind = match &s.kind {
            StmtKind::Skip => StmtKind::Skip,
            StmtKind::Assign { target, value } => {
                let mut pre = Vec::new();
                let value = self.shallow(value, &mut pre);
                if pre.is_empty() {
                    StmtKind::Assign { target: target.clone(), value }
                } else {
                    pre.push(Stmt { kind: StmtKind::Assign { target: target.clone(), value }, span: s.span });
                    return Stmt::seq(pre);
                }
            }
            StmtKind::Seq(a, b) => StmtKind::Seq(Box::new(self.stmt(a)), Box::new(self.stmt(b))),
            StmtKind::If { cond, then_branch, else_branch } => StmtKind::If {
                cond: cond.clone(),
                then_branch: Box::new(self.stmt(then_branch)),
                else_branch: Box::new(self.stmt(else_branch)),
            },
            StmtKind::While { cond, body } => StmtKind::While { cond: cond.clone(), body: Box::new(self.stmt(body)) },
        };
        Stmt { kind, span: s.span }
    }
}

/// Whether every assignment has the shape `x := a`, `x := op(ā)` or
/// `x := X(a |> b)` with atomic `a`, `ā`, `b`.
pub fn is_flat(proc: &Procedure) -> bool {
    let mut ok = true;
    proc.body.visit(&mut |s| {
        if let StmtKind::Assign { value, .. } = &s.kind {
            ok &= match &value.kind {
                ExprKind::Var(_) | ExprKind::Const(_) => true,
                ExprKind::Op { args, .. } => args.iter().all(Expr::is_atomic),
                ExprKind::Oracle { data, bound, .. } => data.is_atomic() && bound.is_atomic(),
            };
        }
    });
    ok
}

/// Introduces temporaries `t1, t2, ...` (skipping names in the procedure)
/// so that every assignment is flat. Guards are left as they are.
pub fn flatten(proc: &Procedure) -> Procedure {
    let mut avoid: BTreeSet<String> = proc.word_vars().chain(&proc.oracle_params).map(|x| x.name.clone()).collect();
    avoid.extend(proc.body.vars().into_iter().map(|x| x.name.clone()));
    flatten_avoiding(proc, &avoid)
}

/// As [`flatten`], also skipping every name in `avoid`.
pub fn flatten_avoiding(proc: &Procedure, avoid: &BTreeSet<String>) -> Procedure {
    let mut avoid = avoid.clone();
    avoid.extend(proc.word_vars().chain(&proc.oracle_params).map(|x| x.name.clone()));
    let mut f = Flattener { avoid: &avoid, next: 0, temps: Vec::new() };
    let body = f.stmt(&proc.body);
    let mut out = proc.clone();
    out.body = body;
    out.locals.extend(f.temps);
    out
}
