//! Simple types `W | T -> T` for the term layer, inferred by unification,
//! plus the rank of a program.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::ast::*;
use crate::span::Span;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SimpleType {
    W,
    Arrow(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn arrow(a: SimpleType, b: SimpleType) -> SimpleType {
        SimpleType::Arrow(Box::new(a), Box::new(b))
    }

    /// `W -> W`.
    pub fn ww() -> SimpleType {
        SimpleType::arrow(SimpleType::W, SimpleType::W)
    }

    /// `ord(W) = 0`, `ord(T -> T') = max(1 + ord(T), ord(T'))`.
    pub fn order(&self) -> u32 {
        match self {
            SimpleType::W => 0,
            SimpleType::Arrow(a, b) => (1 + a.order()).max(b.order()),
        }
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::W => write!(f, "W"),
            SimpleType::Arrow(a, b) => match **a {
                SimpleType::W => write!(f, "W -> {b}"),
                _ => write!(f, "({a}) -> {b}"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("{span}: cannot unify `{left}` with `{right}`")]
    Mismatch { left: String, right: String, span: Span },
    #[error("{span}: infinite type (occurs check)")]
    OccursCheck { span: Span },
    #[error("{span}: unbound variable `{name}`")]
    Unbound { name: String, span: Span },
    #[error("{span}: unknown procedure `{name}`")]
    UnknownProcedure { name: String, span: Span },
    #[error("{span}: call to `{name}` has the wrong number of arguments")]
    CallArity { name: String, span: Span },
    #[error("program type `{0}` is not of the form (W -> W)^k -> W^l -> W")]
    ProgramShape(SimpleType),
}

/// Result of inference. `annotation` holds one type per term node, in the
/// pre-order of [`term_nodes`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleTyping {
    pub program_type: SimpleType,
    pub env: BTreeMap<String, SimpleType>,
    pub annotation: Vec<SimpleType>,
}

/// Pre-order listing of term nodes: node, then lambda body, application
/// head then argument, call closure bodies then arguments.
pub fn term_nodes(t: &Term) -> Vec<&Term> {
    fn go<'a>(t: &'a Term, out: &mut Vec<&'a Term>) {
        out.push(t);
        match &t.kind {
            TermKind::Var(_) => {}
            TermKind::Lambda(_, b) => go(b, out),
            TermKind::App(f, a) => {
                go(f, out);
                go(a, out);
            }
            TermKind::Call { closures, args, .. } => {
                closures.iter().for_each(|c| go(&c.body, out));
                args.iter().for_each(|a| go(a, out));
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut out);
    out
}

#[derive(Clone, Copy, Debug)]
enum Node {
    Var,
    W,
    Arrow(usize, usize),
}

struct Unifier {
    nodes: Vec<Node>,
    parent: Vec<usize>,
}

impl Unifier {
    fn new() -> Unifier {
        Unifier { nodes: Vec::new(), parent: Vec::new() }
    }

    fn mk(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    fn fresh(&mut self) -> usize {
        self.mk(Node::Var)
    }

    fn w(&mut self) -> usize {
        self.mk(Node::W)
    }

    fn arrow(&mut self, a: usize, b: usize) -> usize {
        self.mk(Node::Arrow(a, b))
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn occurs(&mut self, v: usize, t: usize) -> bool {
        let t = self.find(t);
        if t == v {
            return true;
        }
        match self.nodes[t] {
            Node::Arrow(a, b) => self.occurs(v, a) || self.occurs(v, b),
            _ => false,
        }
    }

    fn render(&mut self, t: usize) -> String {
        let t = self.find(t);
        match self.nodes[t] {
            Node::Var => format!("?{t}"),
            Node::W => "W".into(),
            Node::Arrow(a, b) => {
                let a_str = self.render(a);
                let a_root = self.find(a);
                let a_str = if matches!(self.nodes[a_root], Node::Arrow(..)) { format!("({a_str})") } else { a_str };
                format!("{a_str} -> {}", self.render(b))
            }
        }
    }

    fn unify(&mut self, a: usize, b: usize, span: Span) -> Result<(), TypeError> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return Ok(());
        }
        match (self.nodes[ra], self.nodes[rb]) {
            (Node::Var, _) => {
                if self.occurs(ra, rb) {
                    return Err(TypeError::OccursCheck { span });
                }
                self.parent[ra] = rb;
                Ok(())
            }
            (_, Node::Var) => self.unify(b, a, span),
            (Node::W, Node::W) => {
                self.parent[ra] = rb;
                Ok(())
            }
            (Node::Arrow(a1, b1), Node::Arrow(a2, b2)) => {
                self.unify(a1, a2, span)?;
                self.unify(b1, b2, span)?;
                let (ra, rb) = (self.find(ra), self.find(rb));
                if ra != rb {
                    self.parent[ra] = rb;
                }
                Ok(())
            }
            _ => Err(TypeError::Mismatch { left: self.render(ra), right: self.render(rb), span }),
        }
    }

    /// Resolves a type, defaulting unconstrained variables to `W`.
    fn resolve(&mut self, t: usize) -> SimpleType {
        let t = self.find(t);
        match self.nodes[t] {
            Node::Var | Node::W => SimpleType::W,
            Node::Arrow(a, b) => SimpleType::arrow(self.resolve(a), self.resolve(b)),
        }
    }
}

struct Infer<'a> {
    u: Unifier,
    procs: HashMap<&'a str, &'a Procedure>,
    env: Vec<(String, usize)>,
    node_types: Vec<usize>,
    w: usize,
    ww: usize,
}

impl Infer<'_> {
    fn lookup(&self, name: &str) -> Option<usize> {
        self.env.iter().rev().find(|(n, _)| n == name).map(|(_, t)| *t)
    }

    fn term(&mut self, t: &Term) -> Result<usize, TypeError> {
        let slot = self.node_types.len();
        self.node_types.push(usize::MAX);
        let ty = match &t.kind {
            TermKind::Var(x) => {
                self.lookup(&x.name).ok_or_else(|| TypeError::Unbound { name: x.name.clone(), span: x.span })?
            }
            TermKind::Lambda(x, b) => {
                let a = self.u.fresh();
                self.env.push((x.name.clone(), a));
                let body = self.term(b);
                self.env.pop();
                let body = body?;
                self.u.arrow(a, body)
            }
            TermKind::App(f, a) => {
                let tf = self.term(f)?;
                let ta = self.term(a)?;
                let r = self.u.fresh();
                let want = self.u.arrow(ta, r);
                self.u.unify(tf, want, t.span)?;
                r
            }
            TermKind::Call { proc, closures, args } => {
                let p = *self
                    .procs
                    .get(proc.name.as_str())
                    .ok_or_else(|| TypeError::UnknownProcedure { name: proc.name.clone(), span: proc.span })?;
                if p.oracle_params.len() != closures.len() || p.word_params.len() != args.len() {
                    return Err(TypeError::CallArity { name: proc.name.clone(), span: proc.span });
                }
                for c in closures {
                    self.env.push((c.param.name.clone(), self.w));
                    let body = self.term(&c.body);
                    self.env.pop();
                    let (body, w) = (body?, self.w);
                    self.u.unify(body, w, c.span)?;
                }
                for a in args {
                    let ta = self.term(a)?;
                    let w = self.w;
                    self.u.unify(ta, w, a.span)?;
                }
                self.w
            }
        };
        self.node_types[slot] = ty;
        Ok(ty)
    }
}

fn shape_ok(t: &SimpleType) -> bool {
    let mut cur = t;
    let mut words_started = false;
    while let SimpleType::Arrow(a, b) = cur {
        match **a {
            SimpleType::W => words_started = true,
            ref ab if *ab == SimpleType::ww() && !words_started => {}
            _ => return false,
        }
        cur = b;
    }
    *cur == SimpleType::W
}

/// Infers types for every term node of `prg`.
pub fn infer_simple(prg: &Program) -> Result<SimpleTyping, TypeError> {
    let mut u = Unifier::new();
    let w = u.w();
    let (wa, wb) = (u.w(), u.w());
    let ww = u.arrow(wa, wb);
    let mut inf = Infer {
        u,
        procs: prg.procedures().into_iter().map(|p| (p.name.name.as_str(), p)).collect(),
        env: Vec::new(),
        node_types: Vec::new(),
        w,
        ww,
    };
    let boxed = prg.boxed_vars();
    for v in &boxed {
        let t = match v.kind() {
            VarKind::Oracle => inf.ww,
            VarKind::Word => inf.w,
        };
        inf.env.push((v.name.clone(), t));
    }
    let main = inf.term(&prg.main)?;
    inf.u.unify(main, w, prg.main.span)?;
    let mut program_type = SimpleType::W;
    let mut env = BTreeMap::new();
    for v in boxed.iter().rev() {
        let t = inf.lookup(&v.name).unwrap();
        let t = inf.u.resolve(t);
        env.insert(v.name.clone(), t.clone());
        program_type = SimpleType::arrow(t, program_type);
    }
    if !shape_ok(&program_type) {
        return Err(TypeError::ProgramShape(program_type));
    }
    let node_types = std::mem::take(&mut inf.node_types);
    let annotation = node_types.into_iter().map(|t| inf.u.resolve(t)).collect();
    Ok(SimpleTyping { program_type, env, annotation })
}

/// Largest order of a lambda node's type; 0 without lambdas.
pub fn compute_rank(prg: &Program, typing: &SimpleTyping) -> u32 {
    term_nodes(&prg.main)
        .iter()
        .zip(&typing.annotation)
        .filter(|(t, _)| matches!(t.kind, TermKind::Lambda(..)))
        .map(|(_, ty)| ty.order())
        .max()
        .unwrap_or(0)
}

pub fn is_rank0(prg: &Program) -> bool {
    !prg.main.has_lambda()
}

/// Re-checks an annotation against the typing rules without inference.
pub fn check_annotation(prg: &Program, typing: &SimpleTyping) -> Result<(), String> {
    struct Replay<'a> {
        types: &'a [SimpleType],
        next: usize,
        env: Vec<(String, SimpleType)>,
    }
    impl Replay<'_> {
        fn take(&mut self) -> Result<SimpleType, String> {
            let t = self.types.get(self.next).cloned().ok_or("annotation too short")?;
            self.next += 1;
            Ok(t)
        }

        fn term(&mut self, t: &Term) -> Result<SimpleType, String> {
            let ty = self.take()?;
            let fail = |what: &str| Err(format!("{}: {what} at type {ty}", t.span));
            match &t.kind {
                TermKind::Var(x) => match self.env.iter().rev().find(|(n, _)| *n == x.name) {
                    Some((_, tx)) if *tx == ty => {}
                    _ => return fail("variable"),
                },
                TermKind::Lambda(x, b) => {
                    let SimpleType::Arrow(a, r) = &ty else { return fail("lambda") };
                    self.env.push((x.name.clone(), (**a).clone()));
                    let tb = self.term(b)?;
                    self.env.pop();
                    if tb != **r {
                        return fail("lambda body");
                    }
                }
                TermKind::App(f, a) => {
                    let tf = self.term(f)?;
                    let ta = self.term(a)?;
                    if tf != SimpleType::arrow(ta, ty.clone()) {
                        return fail("application");
                    }
                }
                TermKind::Call { closures, args, .. } => {
                    if ty != SimpleType::W {
                        return fail("call");
                    }
                    for c in closures {
                        self.env.push((c.param.name.clone(), SimpleType::W));
                        let tb = self.term(&c.body)?;
                        self.env.pop();
                        if tb != SimpleType::W {
                            return fail("closure body");
                        }
                    }
                    for a in args {
                        if self.term(a)? != SimpleType::W {
                            return fail("call argument");
                        }
                    }
                }
            }
            Ok(ty)
        }
    }
    let mut r = Replay { types: &typing.annotation, next: 0, env: Vec::new() };
    let mut program_type = SimpleType::W;
    for v in prg.boxed_vars().iter().rev() {
        let t = match v.kind() {
            VarKind::Oracle => SimpleType::ww(),
            VarKind::Word => SimpleType::W,
        };
        program_type = SimpleType::arrow(t, program_type);
    }
    for v in prg.boxed_vars() {
        let t = match v.kind() {
            VarKind::Oracle => SimpleType::ww(),
            VarKind::Word => SimpleType::W,
        };
        r.env.push((v.name.clone(), t));
    }
    if r.term(&prg.main)? != SimpleType::W {
        return Err("main term is not of type W".into());
    }
    if r.next != typing.annotation.len() {
        return Err("annotation too long".into());
    }
    if program_type != typing.program_type {
        return Err(format!("program type {} does not match {}", typing.program_type, program_type));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn infer(src: &str) -> Result<(Program, SimpleTyping), TypeError> {
        let p = parse_program(src).unwrap();
        let t = infer_simple(&p)?;
        Ok((p, t))
    }

    #[test]
    fn orders() {
        let ww = SimpleType::ww();
        assert_eq!(SimpleType::W.order(), 0);
        assert_eq!(ww.order(), 1);
        assert_eq!(SimpleType::arrow(ww.clone(), SimpleType::W).order(), 2);
        assert_eq!(SimpleType::arrow(ww, SimpleType::W).to_string(), "(W -> W) -> W");
    }

    #[test]
    fn identity_redex_is_rank_one() {
        let (p, t) = infer("box [y] in (\\a. a) @ y").unwrap();
        assert_eq!(compute_rank(&p, &t), 1);
        assert!(!is_rank0(&p));
        check_annotation(&p, &t).unwrap();
    }

    #[test]
    fn higher_order_lambda_is_rank_two() {
        let (p, t) = infer("box [X, y] in (\\F. F @ y) @ X").unwrap();
        assert_eq!(compute_rank(&p, &t), 2);
        assert_eq!(t.program_type.to_string(), "(W -> W) -> W -> W");
    }

    #[test]
    fn self_application_fails() {
        assert!(matches!(infer("box [X] in X @ X"), Err(TypeError::Mismatch { .. })));
        assert!(matches!(infer("box [y] in (\\a. a @ a) @ y"), Err(TypeError::OccursCheck { .. }) | Err(TypeError::Mismatch { .. })));
    }

    #[test]
    fn boxed_word() {
        let (_, t) = infer("box [x] in x").unwrap();
        assert_eq!(t.program_type.to_string(), "W -> W");
    }

    #[test]
    fn mixed_box_order_is_rejected() {
        assert!(matches!(infer("box [y] in box [X] in X @ y"), Err(TypeError::ProgramShape(_))));
    }
}
