//! Big-step evaluator: expressions, statements, call-by-name terms and
//! procedure calls with oracle continuations.

use std::borrow::Cow;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ast::*;
use crate::ops::Registry;
use crate::syntax::pretty_term;
use crate::word::{restrict, Word};

pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Clone)]
pub struct OracleFn {
    pub name: String,
    f: Arc<dyn Fn(&Word) -> Word + Send + Sync>,
}

impl OracleFn {
    pub fn new(name: impl Into<String>, f: impl Fn(&Word) -> Word + Send + Sync + 'static) -> OracleFn {
        OracleFn { name: name.into(), f: Arc::new(f) }
    }

    pub fn call(&self, w: &Word) -> Word {
        (self.f)(w)
    }
}

impl fmt::Debug for OracleFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OracleFn({})", self.name)
    }
}

/// Oracle descriptions accepted on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleSpec {
    Id,
    Const(Word),
    Prepend(Word),
    Reverse,
    Dup,
    LenOnes,
    /// `compose(a, b)` applies `b` first.
    Compose(Box<OracleSpec>, Box<OracleSpec>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad oracle spec `{0}`")]
pub struct OracleSpecError(pub String);

impl OracleSpec {
    pub fn parse(s: &str) -> Result<OracleSpec, OracleSpecError> {
        let s = s.trim();
        let bad = || OracleSpecError(s.to_string());
        if let Some(w) = s.strip_prefix("const:") {
            return Ok(OracleSpec::Const(Word::from(w)));
        }
        if let Some(w) = s.strip_prefix("prepend:") {
            return Ok(OracleSpec::Prepend(Word::from(w)));
        }
        if let Some(inner) = s.strip_prefix("compose(").and_then(|r| r.strip_suffix(')')) {
            let mut depth = 0usize;
            for (i, c) in inner.char_indices() {
                match c {
                    '(' => depth += 1,
                    ')' => depth = depth.checked_sub(1).ok_or_else(bad)?,
                    ',' if depth == 0 => {
                        let a = OracleSpec::parse(&inner[..i])?;
                        let b = OracleSpec::parse(&inner[i + 1..])?;
                        return Ok(OracleSpec::Compose(Box::new(a), Box::new(b)));
                    }
                    _ => {}
                }
            }
            return Err(bad());
        }
        match s {
            "id" => Ok(OracleSpec::Id),
            "reverse" => Ok(OracleSpec::Reverse),
            "dup" => Ok(OracleSpec::Dup),
            "lenones" => Ok(OracleSpec::LenOnes),
            _ => Err(bad()),
        }
    }

    pub fn apply(&self, w: &Word) -> Word {
        match self {
            OracleSpec::Id => w.clone(),
            OracleSpec::Const(c) => c.clone(),
            OracleSpec::Prepend(p) => p.concat(w),
            OracleSpec::Reverse => Word::from_bytes(w.as_bytes().iter().rev().copied().collect::<Vec<_>>()),
            OracleSpec::Dup => w.concat(w),
            OracleSpec::LenOnes => Word::unary(w.len()),
            OracleSpec::Compose(a, b) => a.apply(&b.apply(w)),
        }
    }

    pub fn to_fn(&self) -> OracleFn {
        let spec = self.clone();
        OracleFn::new(self.to_string(), move |w| spec.apply(w))
    }
}

impl fmt::Display for OracleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleSpec::Id => write!(f, "id"),
            OracleSpec::Const(w) => write!(f, "const:{w}"),
            OracleSpec::Prepend(w) => write!(f, "prepend:{w}"),
            OracleSpec::Reverse => write!(f, "reverse"),
            OracleSpec::Dup => write!(f, "dup"),
            OracleSpec::LenOnes => write!(f, "lenones"),
            OracleSpec::Compose(a, b) => write!(f, "compose({a},{b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuntimeError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("fuel exhausted")]
    FuelExhausted,
    #[error("guard evaluated to \"{0}\", expected \"0\" or \"1\"")]
    GuardNotBoolean(Word),
    #[error("no rule applies to term `{0}`")]
    StuckTerm(String),
    #[error("unknown procedure `{0}`")]
    UnknownProcedure(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("{what}: expected {expected}, got {found}")]
    ArityMismatch { what: String, expected: usize, found: usize },
}

impl RuntimeError {
    /// The variant name, for messages that must name the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            RuntimeError::UnboundVariable(_) => "UnboundVariable",
            RuntimeError::FuelExhausted => "FuelExhausted",
            RuntimeError::GuardNotBoolean(_) => "GuardNotBoolean",
            RuntimeError::StuckTerm(_) => "StuckTerm",
            RuntimeError::UnknownProcedure(_) => "UnknownProcedure",
            RuntimeError::UnknownOperator(_) => "UnknownOperator",
            RuntimeError::ArityMismatch { .. } => "ArityMismatch",
        }
    }
}

/// A store: word variables and oracle variables.
#[derive(Clone, Debug, Default)]
pub struct Store {
    words: HashMap<String, Word>,
    oracles: HashMap<String, OracleFn>,
}

impl Store {
    pub fn new() -> Store {
        Store::default()
    }

    pub fn word(&self, x: &str) -> Result<&Word, RuntimeError> {
        self.words.get(x).ok_or_else(|| RuntimeError::UnboundVariable(x.to_string()))
    }

    pub fn set_word(&mut self, x: &str, w: Word) -> Option<Word> {
        self.words.insert(x.to_string(), w)
    }

    fn unset_word(&mut self, x: &str) {
        self.words.remove(x);
    }

    pub fn oracle(&self, x: &str) -> Result<&OracleFn, RuntimeError> {
        self.oracles.get(x).ok_or_else(|| RuntimeError::UnboundVariable(x.to_string()))
    }

    pub fn set_oracle(&mut self, x: &str, f: OracleFn) {
        self.oracles.insert(x.to_string(), f);
    }

    /// Word bindings, sorted by name.
    pub fn words(&self) -> Vec<(&str, &Word)> {
        let mut v: Vec<_> = self.words.iter().map(|(k, w)| (k.as_str(), w)).collect();
        v.sort();
        v
    }
}

/// Oracle variables of the running procedure, bound to closures.
pub type Continuation<'c> = HashMap<&'c str, &'c Closure>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EvalMode {
    /// Call-by-name reduction of terms.
    #[default]
    ByName,
    /// Direct evaluation of lambda-free terms.
    RankZero,
}

pub struct Interpreter<'p> {
    procs: HashMap<&'p str, &'p Procedure>,
    registry: &'p Registry,
    fuel: u64,
    mode: EvalMode,
    fresh: usize,
}

impl<'p> Interpreter<'p> {
    pub fn new(procs: impl IntoIterator<Item = &'p Procedure>, registry: &'p Registry, fuel: u64) -> Self {
        Interpreter {
            procs: procs.into_iter().map(|p| (p.name.name.as_str(), p)).collect(),
            registry,
            fuel,
            mode: EvalMode::ByName,
            fresh: 0,
        }
    }

    pub fn with_mode(mut self, mode: EvalMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn remaining_fuel(&self) -> u64 {
        self.fuel
    }

    fn tick(&mut self) -> Result<(), RuntimeError> {
        if self.fuel == 0 {
            return Err(RuntimeError::FuelExhausted);
        }
        self.fuel -= 1;
        Ok(())
    }

    pub fn eval_expr(&mut self, store: &mut Store, phi: &Continuation<'_>, e: &Expr) -> Result<Word, RuntimeError> {
        match &e.kind {
            ExprKind::Var(x) => store.word(&x.name).cloned(),
            ExprKind::Const(w) => Ok(w.clone()),
            ExprKind::Op { op, args } => {
                let info =
                    self.registry.get(&op.name).ok_or_else(|| RuntimeError::UnknownOperator(op.name.clone()))?;
                if info.arity != args.len() {
                    return Err(RuntimeError::ArityMismatch {
                        what: format!("operator `{}`", op.name),
                        expected: info.arity,
                        found: args.len(),
                    });
                }
                let vals = args.iter().map(|a| self.eval_expr(store, phi, a)).collect::<Result<Vec<_>, _>>()?;
                Ok(info.apply(&vals))
            }
            ExprKind::Oracle { oracle, data, bound } => {
                let v = self.eval_expr(store, phi, data)?;
                let u = self.eval_expr(store, phi, bound)?;
                let closure = *phi.get(oracle.name.as_str()).ok_or_else(|| RuntimeError::UnboundVariable(oracle.name.clone()))?;
                self.tick()?;
                let x = closure.param.name.as_str();
                let saved = store.set_word(x, restrict(&v, &u));
                let out = self.eval_term(store, &closure.body);
                match saved {
                    Some(w) => store.set_word(x, w),
                    None => {
                        store.unset_word(x);
                        None
                    }
                };
                out
            }
        }
    }

    fn guard(&mut self, store: &mut Store, phi: &Continuation<'_>, e: &Expr) -> Result<bool, RuntimeError> {
        let w = self.eval_expr(store, phi, e)?;
        match w.as_bytes() {
            b"1" => Ok(true),
            b"0" => Ok(false),
            _ => Err(RuntimeError::GuardNotBoolean(w)),
        }
    }

    pub fn eval_stmt(&mut self, store: &mut Store, phi: &Continuation<'_>, st: &Stmt) -> Result<(), RuntimeError> {
        self.tick()?;
        match &st.kind {
            StmtKind::Skip => Ok(()),
            StmtKind::Assign { target, value } => {
                let w = self.eval_expr(store, phi, value)?;
                store.set_word(&target.name, w);
                Ok(())
            }
            StmtKind::Seq(a, b) => {
                self.eval_stmt(store, phi, a)?;
                self.eval_stmt(store, phi, b)
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                if self.guard(store, phi, cond)? {
                    self.eval_stmt(store, phi, then_branch)
                } else {
                    self.eval_stmt(store, phi, else_branch)
                }
            }
            StmtKind::While { cond, body } => {
                while self.guard(store, phi, cond)? {
                    self.eval_stmt(store, phi, body)?;
                    self.tick()?;
                }
                Ok(())
            }
        }
    }

    /// Evaluates a type-0 term. The store is never modified.
    pub fn eval_term(&mut self, store: &Store, t: &Term) -> Result<Word, RuntimeError> {
        match self.mode {
            EvalMode::ByName => self.eval_by_name(store, t),
            EvalMode::RankZero => self.eval_rank0(store, t),
        }
    }

    fn eval_rank0(&mut self, store: &Store, t: &Term) -> Result<Word, RuntimeError> {
        match &t.kind {
            TermKind::Var(x) => store.word(&x.name).cloned(),
            TermKind::App(f, a) => match &f.kind {
                TermKind::Var(x) => {
                    let oracle = store.oracle(&x.name)?.clone();
                    let w = self.eval_rank0(store, a)?;
                    self.tick()?;
                    Ok(oracle.call(&w))
                }
                _ => Err(RuntimeError::StuckTerm(pretty_term(t))),
            },
            TermKind::Call { proc, closures, args } => self.call(store, proc, closures, args),
            TermKind::Lambda(..) => Err(RuntimeError::StuckTerm(pretty_term(t))),
        }
    }

    fn eval_by_name(&mut self, store: &Store, t: &Term) -> Result<Word, RuntimeError> {
        let mut head: Cow<'_, Term> = Cow::Borrowed(t);
        let mut spine: Vec<Cow<'_, Term>> = Vec::new();
        loop {
            head = match split_app(head) {
                Ok((f, a)) => {
                    spine.push(a);
                    f
                }
                Err(h) => match (&h.kind, spine.pop()) {
                    (TermKind::Lambda(x, body), Some(arg)) => {
                        self.tick()?;
                        Cow::Owned(self.subst(body, &x.name, &arg))
                    }
                    (_, popped) => {
                        spine.extend(popped);
                        head = h;
                        break;
                    }
                },
            };
        }
        match (&head.kind, spine.len()) {
            (TermKind::Var(x), 0) => store.word(&x.name).cloned(),
            (TermKind::Var(x), 1) => {
                let oracle = store.oracle(&x.name)?.clone();
                let w = self.eval_by_name(store, &spine[0])?;
                self.tick()?;
                Ok(oracle.call(&w))
            }
            (TermKind::Call { proc, closures, args }, 0) => self.call(store, proc, closures, args),
            _ => {
                let mut t = head.into_owned();
                for a in spine.into_iter().rev() {
                    t = Term::app(t, a.into_owned());
                }
                Err(RuntimeError::StuckTerm(pretty_term(&t)))
            }
        }
    }

    fn call(&mut self, store: &Store, proc: &Ident, closures: &[Closure], args: &[Term]) -> Result<Word, RuntimeError> {
        let p = *self.procs.get(proc.name.as_str()).ok_or_else(|| RuntimeError::UnknownProcedure(proc.name.clone()))?;
        if p.oracle_params.len() != closures.len() || p.word_params.len() != args.len() {
            return Err(RuntimeError::ArityMismatch {
                what: format!("call to `{}`", proc.name),
                expected: p.oracle_params.len() + p.word_params.len(),
                found: closures.len() + args.len(),
            });
        }
        self.tick()?;
        let vals = args.iter().map(|a| self.eval_term(store, a)).collect::<Result<Vec<_>, _>>()?;
        let mut inner = store.clone();
        for (x, w) in p.word_params.iter().zip(vals) {
            inner.set_word(&x.name, w);
        }
        for y in &p.locals {
            inner.set_word(&y.name, Word::empty());
        }
        let phi: Continuation<'_> = p.oracle_params.iter().map(|x| x.name.as_str()).zip(closures.iter()).collect();
        self.eval_stmt(&mut inner, &phi, &p.body)?;
        inner.word(&p.ret.name).cloned()
    }

    fn fresh_name(&mut self, base: &str, avoid: &BTreeSet<String>) -> String {
        loop {
            self.fresh += 1;
            let name = format!("{base}_{}", self.fresh);
            if !avoid.contains(&name) {
                return name;
            }
        }
    }

    /// Capture-avoiding `body[x := s]`.
    fn subst(&mut self, body: &Term, x: &str, s: &Term) -> Term {
        let fv = s.free_vars();
        self.subst_with(body, x, s, &fv)
    }

    fn rebind(&mut self, y: &Ident, body: &Term, x: &str, s: &Term, fv: &BTreeSet<String>) -> (Ident, Term) {
        if y.name == x {
            return (y.clone(), body.clone());
        }
        if fv.contains(&y.name) {
            let mut avoid = fv.clone();
            avoid.extend(body.free_vars());
            let fresh = Ident { name: self.fresh_name(&y.name, &avoid), span: y.span };
            let renamed = self.subst(body, &y.name, &Term::new(TermKind::Var(fresh.clone())));
            let b = self.subst_with(&renamed, x, s, fv);
            return (fresh, b);
        }
        (y.clone(), self.subst_with(body, x, s, fv))
    }

    fn subst_with(&mut self, t: &Term, x: &str, s: &Term, fv: &BTreeSet<String>) -> Term {
        let kind = match &t.kind {
            TermKind::Var(y) if y.name == x => return s.clone(),
            TermKind::Var(_) => return t.clone(),
            TermKind::Lambda(y, b) => {
                let (y, b) = self.rebind(y, b, x, s, fv);
                TermKind::Lambda(y, Box::new(b))
            }
            TermKind::App(f, a) => {
                TermKind::App(Box::new(self.subst_with(f, x, s, fv)), Box::new(self.subst_with(a, x, s, fv)))
            }
            TermKind::Call { proc, closures, args } => TermKind::Call {
                proc: proc.clone(),
                closures: closures
                    .iter()
                    .map(|c| {
                        let (param, body) = self.rebind(&c.param, &c.body, x, s, fv);
                        Closure { param, body, span: c.span }
                    })
                    .collect(),
                args: args.iter().map(|a| self.subst_with(a, x, s, fv)).collect(),
            },
        };
        Term { kind, span: t.span }
    }
}

fn split_app(t: Cow<'_, Term>) -> Result<(Cow<'_, Term>, Cow<'_, Term>), Cow<'_, Term>> {
    match t {
        Cow::Borrowed(Term { kind: TermKind::App(f, a), .. }) => Ok((Cow::Borrowed(&**f), Cow::Borrowed(&**a))),
        Cow::Owned(Term { kind: TermKind::App(f, a), .. }) => Ok((Cow::Owned(*f), Cow::Owned(*a))),
        other => Err(other),
    }
}

/// Runs a closed program: boxed oracle variables take `oracles` in order,
/// boxed word variables take `words` in order.
pub fn run_program(
    prg: &Program,
    registry: &Registry,
    oracles: &[OracleFn],
    words: &[Word],
    fuel: u64,
    mode: EvalMode,
) -> Result<Word, RuntimeError> {
    let boxed = prg.boxed_vars();
    let n_oracles = boxed.iter().filter(|v| v.kind() == VarKind::Oracle).count();
    let n_words = boxed.len() - n_oracles;
    if n_oracles != oracles.len() {
        return Err(RuntimeError::ArityMismatch { what: "oracle inputs".into(), expected: n_oracles, found: oracles.len() });
    }
    if n_words != words.len() {
        return Err(RuntimeError::ArityMismatch { what: "word inputs".into(), expected: n_words, found: words.len() });
    }
    let mut store = Store::new();
    let (mut oi, mut wi) = (oracles.iter(), words.iter());
    for v in boxed {
        match v.kind() {
            VarKind::Oracle => store.set_oracle(&v.name, oi.next().unwrap().clone()),
            VarKind::Word => {
                store.set_word(&v.name, wi.next().unwrap().clone());
            }
        }
    }
    let procs = prg.procedures();
    let mut interp = Interpreter::new(procs, registry, fuel).with_mode(mode);
    interp.eval_term(&store, &prg.main)
}
