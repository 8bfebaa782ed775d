//! Abstract syntax of programs, procedures, statements, expressions and terms.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::ops::Registry;
use crate::span::Span;
use crate::word::Word;

/// Type-0 (word) variables start with a lowercase letter or `_`;
/// type-1 (oracle) variables start with an uppercase letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum VarKind {
    Word,
    Oracle,
}

pub fn var_kind(name: &str) -> VarKind {
    match name.chars().next() {
        Some(c) if c.is_ascii_uppercase() => VarKind::Oracle,
        _ => VarKind::Word,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Ident {
        Ident { name: name.into(), span: Span::DUMMY }
    }

    pub fn kind(&self) -> VarKind {
        var_kind(&self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Var(Ident),
    /// A quoted word literal.
    Const(Word),
    Op { op: Ident, args: Vec<Expr> },
    Oracle { oracle: Ident, data: Box<Expr>, bound: Box<Expr> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    Skip,
    Assign { target: Ident, value: Expr },
    Seq(Box<Stmt>, Box<Stmt>),
    If { cond: Expr, then_branch: Box<Stmt>, else_branch: Box<Stmt> },
    While { cond: Expr, body: Box<Stmt> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub kind: TermKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermKind {
    Var(Ident),
    Lambda(Ident, Box<Term>),
    App(Box<Term>, Box<Term>),
    Call { proc: Ident, closures: Vec<Closure>, args: Vec<Term> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    pub param: Ident,
    pub body: Term,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Procedure {
    pub name: Ident,
    pub oracle_params: Vec<Ident>,
    pub word_params: Vec<Ident>,
    pub locals: Vec<Ident>,
    pub body: Stmt,
    pub ret: Ident,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Layer {
    Box(Vec<Ident>),
    Declare(Vec<Procedure>),
}

/// `box [...] in` and `declare ... in` layers, outermost first, around the
/// main term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub layers: Vec<Layer>,
    pub main: Term,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind) -> Expr {
        Expr { kind, span: Span::DUMMY }
    }

    pub fn var(name: &str) -> Expr {
        Expr::new(ExprKind::Var(Ident::new(name)))
    }

    pub fn op(name: &str, args: Vec<Expr>) -> Expr {
        Expr::new(ExprKind::Op { op: Ident::new(name), args })
    }

    pub fn eps() -> Expr {
        Expr::op("eps", vec![])
    }

    pub fn oracle(name: &str, data: Expr, bound: Expr) -> Expr {
        Expr::new(ExprKind::Oracle { oracle: Ident::new(name), data: Box::new(data), bound: Box::new(bound) })
    }

    /// Variables, constants and nullary operator applications.
    pub fn is_atomic(&self) -> bool {
        match &self.kind {
            ExprKind::Var(_) | ExprKind::Const(_) => true,
            ExprKind::Op { args, .. } => args.is_empty(),
            ExprKind::Oracle { .. } => false,
        }
    }

    /// Denotes the empty word syntactically: `~` or `""`.
    pub fn is_eps(&self) -> bool {
        match &self.kind {
            ExprKind::Const(w) => w.is_empty(),
            ExprKind::Op { op, args } => op.name == "eps" && args.is_empty(),
            _ => false,
        }
    }

    pub fn node_count(&self) -> usize {
        1 + match &self.kind {
            ExprKind::Var(_) | ExprKind::Const(_) => 0,
            ExprKind::Op { args, .. } => args.iter().map(Expr::node_count).sum(),
            ExprKind::Oracle { data, bound, .. } => data.node_count() + bound.node_count(),
        }
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a Ident>) {
        match &self.kind {
            ExprKind::Var(x) => out.push(x),
            ExprKind::Const(_) => {}
            ExprKind::Op { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
            ExprKind::Oracle { oracle, data, bound } => {
                out.push(oracle);
                data.collect_vars(out);
                bound.collect_vars(out);
            }
        }
    }

    /// All variable occurrences, oracle names included, left to right.
    pub fn vars(&self) -> Vec<&Ident> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Stmt {
        Stmt { kind, span: Span::DUMMY }
    }

    pub fn skip() -> Stmt {
        Stmt::new(StmtKind::Skip)
    }

    pub fn assign(target: &str, value: Expr) -> Stmt {
        Stmt::new(StmtKind::Assign { target: Ident::new(target), value })
    }

    /// Right-nested sequence of `stmts`; `skip` when empty.
    pub fn seq(stmts: Vec<Stmt>) -> Stmt {
        let mut it = stmts.into_iter().rev();
        let Some(mut acc) = it.next() else {
            return Stmt::skip();
        };
        for s in it {
            let span = s.span.join(acc.span);
            acc = Stmt { kind: StmtKind::Seq(Box::new(s), Box::new(acc)), span };
        }
        acc
    }

    pub fn if_(cond: Expr, then_branch: Stmt, else_branch: Stmt) -> Stmt {
        Stmt::new(StmtKind::If { cond, then_branch: Box::new(then_branch), else_branch: Box::new(else_branch) })
    }

    pub fn while_(cond: Expr, body: Stmt) -> Stmt {
        Stmt::new(StmtKind::While { cond, body: Box::new(body) })
    }

    /// The statements of a (possibly nested) sequence, left to right.
    pub fn flatten_seq(&self) -> Vec<&Stmt> {
        let mut out = Vec::new();
        fn go<'a>(s: &'a Stmt, out: &mut Vec<&'a Stmt>) {
            match &s.kind {
                StmtKind::Seq(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                _ => out.push(s),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn node_count(&self) -> usize {
        1 + match &self.kind {
            StmtKind::Skip => 0,
            StmtKind::Assign { value, .. } => value.node_count(),
            StmtKind::Seq(a, b) => a.node_count() + b.node_count(),
            StmtKind::If { cond, then_branch, else_branch } => {
                cond.node_count() + then_branch.node_count() + else_branch.node_count()
            }
            StmtKind::While { cond, body } => cond.node_count() + body.node_count(),
        }
    }

    pub fn while_count(&self) -> usize {
        match &self.kind {
            StmtKind::Skip | StmtKind::Assign { .. } => 0,
            StmtKind::Seq(a, b) => a.while_count() + b.while_count(),
            StmtKind::If { then_branch, else_branch, .. } => then_branch.while_count() + else_branch.while_count(),
            StmtKind::While { body, .. } => 1 + body.while_count(),
        }
    }

    /// Pre-order visit of every statement node.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Stmt)) {
        f(self);
        match &self.kind {
            StmtKind::Skip | StmtKind::Assign { .. } => {}
            StmtKind::Seq(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            StmtKind::If { then_branch, else_branch, .. } => {
                then_branch.visit(f);
                else_branch.visit(f);
            }
            StmtKind::While { body, .. } => body.visit(f),
        }
    }

    /// Every variable occurrence: assignment targets and expression variables.
    pub fn vars(&self) -> Vec<&Ident> {
        let mut out = Vec::new();
        self.visit(&mut |s| match &s.kind {
            StmtKind::Assign { target, value } => {
                out.push(target);
                value.collect_vars(&mut out);
            }
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => cond.collect_vars(&mut out),
            _ => {}
        });
        out
    }
}

impl Term {
    pub fn new(kind: TermKind) -> Term {
        Term { kind, span: Span::DUMMY }
    }

    pub fn var(name: &str) -> Term {
        Term::new(TermKind::Var(Ident::new(name)))
    }

    pub fn lambda(binder: &str, body: Term) -> Term {
        Term::new(TermKind::Lambda(Ident::new(binder), Box::new(body)))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::new(TermKind::App(Box::new(f), Box::new(a)))
    }

    pub fn call(proc: &str, closures: Vec<Closure>, args: Vec<Term>) -> Term {
        Term::new(TermKind::Call { proc: Ident::new(proc), closures, args })
    }

    pub fn node_count(&self) -> usize {
        1 + match &self.kind {
            TermKind::Var(_) => 0,
            TermKind::Lambda(_, b) => b.node_count(),
            TermKind::App(f, a) => f.node_count() + a.node_count(),
            TermKind::Call { closures, args, .. } => {
                closures.iter().map(|c| 1 + c.body.node_count()).sum::<usize>()
                    + args.iter().map(Term::node_count).sum::<usize>()
            }
        }
    }

    pub fn has_lambda(&self) -> bool {
        match &self.kind {
            TermKind::Var(_) => false,
            TermKind::Lambda(..) => true,
            TermKind::App(f, a) => f.has_lambda() || a.has_lambda(),
            TermKind::Call { closures, args, .. } => {
                closures.iter().any(|c| c.body.has_lambda()) || args.iter().any(Term::has_lambda)
            }
        }
    }

    /// Pre-order visit of every call node.
    pub fn visit_calls<'a>(&'a self, f: &mut impl FnMut(&'a Ident, &'a [Closure], &'a [Term])) {
        match &self.kind {
            TermKind::Var(_) => {}
            TermKind::Lambda(_, b) => b.visit_calls(f),
            TermKind::App(a, b) => {
                a.visit_calls(f);
                b.visit_calls(f);
            }
            TermKind::Call { proc, closures, args } => {
                f(proc, closures, args);
                closures.iter().for_each(|c| c.body.visit_calls(f));
                args.iter().for_each(|t| t.visit_calls(f));
            }
        }
    }
}

impl Closure {
    pub fn new(param: &str, body: Term) -> Closure {
        Closure { param: Ident::new(param), body, span: Span::DUMMY }
    }
}

impl Procedure {
    pub fn new(name: &str, oracles: &[&str], params: &[&str], locals: &[&str], body: Stmt, ret: &str) -> Procedure {
        let ids = |xs: &[&str]| xs.iter().map(|x| Ident::new(*x)).collect();
        Procedure {
            name: Ident::new(name),
            oracle_params: ids(oracles),
            word_params: ids(params),
            locals: ids(locals),
            body,
            ret: Ident::new(ret),
            span: Span::DUMMY,
        }
    }

    /// Word parameters followed by locals.
    pub fn word_vars(&self) -> impl Iterator<Item = &Ident> {
        self.word_params.iter().chain(self.locals.iter())
    }

    pub fn node_count(&self) -> usize {
        1 + self.body.node_count()
    }
}

impl Program {
    pub fn new(layers: Vec<Layer>, main: Term) -> Program {
        Program { layers, main, span: Span::DUMMY }
    }

    /// Boxed variables in order of appearance.
    pub fn boxed_vars(&self) -> Vec<&Ident> {
        self.layers
            .iter()
            .filter_map(|l| match l {
                Layer::Box(v) => Some(v.iter()),
                Layer::Declare(_) => None,
            })
            .flatten()
            .collect()
    }

    pub fn procedures(&self) -> Vec<&Procedure> {
        self.layers
            .iter()
            .filter_map(|l| match l {
                Layer::Declare(ps) => Some(ps.iter()),
                Layer::Box(_) => None,
            })
            .flatten()
            .collect()
    }

    pub fn procedure(&self, name: &str) -> Option<&Procedure> {
        self.procedures().into_iter().find(|p| p.name.name == name)
    }

    /// Every term position: the main term and every closure body below it.
    pub fn terms(&self) -> Vec<&Term> {
        let mut out = vec![&self.main];
        self.main.visit_calls(&mut |_, cs, _| out.extend(cs.iter().map(|c| &c.body)));
        out
    }

    /// `box [X̄, x̄] in declare p̄ in t` with each layer optional when empty.
    pub fn is_normal_form(&self) -> bool {
        let mut seen_word = false;
        let mut i = 0;
        if let Some(Layer::Box(vs)) = self.layers.first() {
            for v in vs {
                match v.kind() {
                    VarKind::Word => seen_word = true,
                    VarKind::Oracle if seen_word => return false,
                    VarKind::Oracle => {}
                }
            }
            i = 1;
        }
        matches!(&self.layers[i..], [] | [Layer::Declare(_)])
    }

    pub fn node_count(&self) -> usize {
        self.procedures().iter().map(|p| p.node_count()).sum::<usize>() + self.main.node_count()
    }

    /// Copy with every span reset, for structural comparison.
    pub fn without_spans(&self) -> Program {
        let mut p = self.clone();
        p.strip_spans();
        p
    }

    fn strip_spans(&mut self) {
        self.span = Span::DUMMY;
        for l in &mut self.layers {
            match l {
                Layer::Box(vs) => vs.iter_mut().for_each(|v| v.span = Span::DUMMY),
                Layer::Declare(ps) => ps.iter_mut().for_each(Procedure::strip_spans),
            }
        }
        self.main.strip_spans();
    }
}

impl Procedure {
    pub fn without_spans(&self) -> Procedure {
        let mut p = self.clone();
        p.strip_spans();
        p
    }

    fn strip_spans(&mut self) {
        self.span = Span::DUMMY;
        self.name.span = Span::DUMMY;
        self.ret.span = Span::DUMMY;
        for v in self.oracle_params.iter_mut().chain(&mut self.word_params).chain(&mut self.locals) {
            v.span = Span::DUMMY;
        }
        self.body.strip_spans();
    }
}

impl Stmt {
    pub fn without_spans(&self) -> Stmt {
        let mut s = self.clone();
        s.strip_spans();
        s
    }

    fn strip_spans(&mut self) {
        self.span = Span::DUMMY;
        match &mut self.kind {
            StmtKind::Skip => {}
            StmtKind::Assign { target, value } => {
                target.span = Span::DUMMY;
                value.strip_spans();
            }
            StmtKind::Seq(a, b) => {
                a.strip_spans();
                b.strip_spans();
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                cond.strip_spans();
                then_branch.strip_spans();
                else_branch.strip_spans();
            }
            StmtKind::While { cond, body } => {
                cond.strip_spans();
                body.strip_spans();
            }
        }
    }
}

impl Expr {
    fn strip_spans(&mut self) {
        self.span = Span::DUMMY;
        match &mut self.kind {
            ExprKind::Var(x) => x.span = Span::DUMMY,
            ExprKind::Const(_) => {}
            ExprKind::Op { op, args } => {
                op.span = Span::DUMMY;
                args.iter_mut().for_each(Expr::strip_spans);
            }
            ExprKind::Oracle { oracle, data, bound } => {
                oracle.span = Span::DUMMY;
                data.strip_spans();
                bound.strip_spans();
            }
        }
    }
}

impl Term {
    fn strip_spans(&mut self) {
        self.span = Span::DUMMY;
        match &mut self.kind {
            TermKind::Var(x) => x.span = Span::DUMMY,
            TermKind::Lambda(x, b) => {
                x.span = Span::DUMMY;
                b.strip_spans();
            }
            TermKind::App(f, a) => {
                f.strip_spans();
                a.strip_spans();
            }
            TermKind::Call { proc, closures, args } => {
                proc.span = Span::DUMMY;
                for c in closures {
                    c.span = Span::DUMMY;
                    c.param.span = Span::DUMMY;
                    c.body.strip_spans();
                }
                args.iter_mut().for_each(Term::strip_spans);
            }
        }
    }
}

/// Free variables, computed per node kind.
pub trait FreeVars {
    fn free_vars(&self) -> BTreeSet<String>;
}

impl FreeVars for Expr {
    fn free_vars(&self) -> BTreeSet<String> {
        self.vars().into_iter().map(|x| x.name.clone()).collect()
    }
}

impl FreeVars for Stmt {
    fn free_vars(&self) -> BTreeSet<String> {
        self.vars().into_iter().map(|x| x.name.clone()).collect()
    }
}

impl FreeVars for Term {
    fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn go(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match &t.kind {
                TermKind::Var(x) => {
                    if !bound.contains(&x.name) {
                        out.insert(x.name.clone());
                    }
                }
                TermKind::Lambda(x, b) => {
                    bound.push(x.name.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                TermKind::App(f, a) => {
                    go(f, bound, out);
                    go(a, bound, out);
                }
                TermKind::Call { closures, args, .. } => {
                    for c in closures {
                        bound.push(c.param.name.clone());
                        go(&c.body, bound, out);
                        bound.pop();
                    }
                    args.iter().for_each(|a| go(a, bound, out));
                }
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

impl FreeVars for Closure {
    fn free_vars(&self) -> BTreeSet<String> {
        let mut fv = self.body.free_vars();
        fv.remove(&self.param.name);
        fv
    }
}

impl FreeVars for Procedure {
    fn free_vars(&self) -> BTreeSet<String> {
        let mut fv = self.body.free_vars();
        fv.insert(self.ret.name.clone());
        for v in self.oracle_params.iter().chain(self.word_vars()) {
            fv.remove(&v.name);
        }
        fv
    }
}

impl FreeVars for Program {
    fn free_vars(&self) -> BTreeSet<String> {
        let mut fv = self.main.free_vars();
        for p in self.procedures() {
            fv.extend(p.free_vars());
        }
        for v in self.boxed_vars() {
            fv.remove(&v.name);
        }
        fv
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum DiagnosticKind {
    NameClash,
    DuplicateVariable,
    FreeVariable,
    UnknownProcedure,
    CallArity,
    UnknownOperator,
    OperatorArity,
    BadLiteral,
    KindMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
    pub span: Span,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {:?}: {}", self.span, self.kind, self.message)
    }
}

struct Checker<'a> {
    registry: &'a Registry,
    diags: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn push(&mut self, kind: DiagnosticKind, span: Span, message: String) {
        self.diags.push(Diagnostic { kind, message, span });
    }

    fn expr(&mut self, e: &Expr, words: &HashSet<&str>, oracles: &HashSet<&str>) {
        match &e.kind {
            ExprKind::Var(x) => {
                if !words.contains(x.name.as_str()) {
                    self.push(DiagnosticKind::FreeVariable, x.span, format!("variable `{}` is not declared", x.name));
                }
            }
            ExprKind::Const(w) => {
                if !self.registry.alphabet().admits(w) {
                    self.push(DiagnosticKind::BadLiteral, e.span, format!("literal \"{w}\" leaves the alphabet"));
                }
            }
            ExprKind::Op { op, args } => {
                match self.registry.get(&op.name) {
                    None => self.push(DiagnosticKind::UnknownOperator, op.span, format!("unknown operator `{}`", op.name)),
                    Some(info) if info.arity != args.len() => self.push(
                        DiagnosticKind::OperatorArity,
                        e.span,
                        format!("`{}` expects {} argument(s), got {}", op.name, info.arity, args.len()),
                    ),
                    Some(_) => {}
                }
                args.iter().for_each(|a| self.expr(a, words, oracles));
            }
            ExprKind::Oracle { oracle, data, bound } => {
                if !oracles.contains(oracle.name.as_str()) {
                    self.push(
                        DiagnosticKind::FreeVariable,
                        oracle.span,
                        format!("oracle `{}` is not a parameter", oracle.name),
                    );
                }
                self.expr(data, words, oracles);
                self.expr(bound, words, oracles);
            }
        }
    }

    fn procedure(&mut self, p: &Procedure) {
        let mut seen: HashMap<&str, Span> = HashMap::new();
        for v in p.oracle_params.iter().chain(p.word_vars()) {
            if seen.insert(v.name.as_str(), v.span).is_some() {
                self.push(
                    DiagnosticKind::DuplicateVariable,
                    v.span,
                    format!("`{}` declared twice in `{}`", v.name, p.name.name),
                );
            }
        }
        for v in &p.oracle_params {
            if v.kind() != VarKind::Oracle {
                self.push(DiagnosticKind::KindMismatch, v.span, format!("`{}` is not an oracle variable", v.name));
            }
        }
        for v in p.word_vars() {
            if v.kind() != VarKind::Word {
                self.push(DiagnosticKind::KindMismatch, v.span, format!("`{}` is not a word variable", v.name));
            }
        }
        let words: HashSet<&str> = p.word_vars().map(|v| v.name.as_str()).collect();
        let oracles: HashSet<&str> = p.oracle_params.iter().map(|v| v.name.as_str()).collect();
        p.body.visit(&mut |s| match &s.kind {
            StmtKind::Assign { target, value } => {
                if !words.contains(target.name.as_str()) {
                    self.push(
                        DiagnosticKind::FreeVariable,
                        target.span,
                        format!("variable `{}` is not declared", target.name),
                    );
                }
                self.expr(value, &words, &oracles);
            }
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => self.expr(cond, &words, &oracles),
            _ => {}
        });
        if !words.contains(p.ret.name.as_str()) {
            self.push(
                DiagnosticKind::FreeVariable,
                p.ret.span,
                format!("returned variable `{}` is not declared", p.ret.name),
            );
        }
    }
}

/// Every violated program or procedure invariant, in source order.
pub fn check_well_formed(prg: &Program, registry: &Registry) -> Vec<Diagnostic> {
    let mut c = Checker { registry, diags: Vec::new() };
    let mut procs: HashMap<&str, &Procedure> = HashMap::new();
    for p in prg.procedures() {
        if procs.insert(p.name.name.as_str(), p).is_some() {
            c.push(DiagnosticKind::NameClash, p.name.span, format!("procedure `{}` declared twice", p.name.name));
        }
        c.procedure(p);
    }
    let mut boxed = HashSet::new();
    for v in prg.boxed_vars() {
        if !boxed.insert(v.name.as_str()) {
            c.push(DiagnosticKind::DuplicateVariable, v.span, format!("`{}` boxed twice", v.name));
        }
    }
    for t in prg.terms() {
        t.visit_calls(&mut |name, closures, args| match procs.get(name.name.as_str()) {
            None => c.push(
                DiagnosticKind::UnknownProcedure,
                name.span,
                format!("call to undeclared procedure `{}`", name.name),
            ),
            Some(p) => {
                if p.oracle_params.len() != closures.len() || p.word_params.len() != args.len() {
                    c.push(
                        DiagnosticKind::CallArity,
                        name.span,
                        format!(
                            "`{}` takes {} closure(s) and {} word argument(s), got {} and {}",
                            name.name,
                            p.oracle_params.len(),
                            p.word_params.len(),
                            closures.len(),
                            args.len()
                        ),
                    );
                }
                for cl in closures {
                    if cl.param.kind() != VarKind::Word {
                        c.push(
                            DiagnosticKind::KindMismatch,
                            cl.param.span,
                            format!("closure parameter `{}` must be a word variable", cl.param.name),
                        );
                    }
                }
            }
        });
    }
    let mut main_fv: Vec<String> = prg.main.free_vars().into_iter().collect();
    main_fv.retain(|v| !boxed.contains(v.as_str()));
    for v in main_fv {
        c.push(DiagnosticKind::FreeVariable, prg.main.span, format!("free variable `{v}` in the main term"));
    }
    c.diags
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("program is not closed: free variable(s) {0:?}")]
    NotClosed(Vec<String>),
}

/// Moves every box to the front (oracle variables first, each kind in its
/// original order), then a single declare with every procedure.
pub fn normalize(prg: &Program) -> Result<Program, NormalizeError> {
    let fv = prg.free_vars();
    if !fv.is_empty() {
        return Err(NormalizeError::NotClosed(fv.into_iter().collect()));
    }
    if prg.is_normal_form() {
        return Ok(prg.clone());
    }
    let boxed = prg.boxed_vars();
    let mut vars: Vec<Ident> = boxed.iter().filter(|v| v.kind() == VarKind::Oracle).map(|v| (*v).clone()).collect();
    vars.extend(boxed.iter().filter(|v| v.kind() == VarKind::Word).map(|v| (*v).clone()));
    let procs: Vec<Procedure> = prg.procedures().into_iter().cloned().collect();
    let mut layers = Vec::new();
    if !vars.is_empty() {
        layers.push(Layer::Box(vars));
    }
    if !procs.is_empty() {
        layers.push(Layer::Declare(procs));
    }
    Ok(Program { layers, main: prg.main.clone(), span: prg.span })
}
