//! Random program generators and reference implementations shared by the
//! integration tests.
#![allow(dead_code)]

use bff_core::ast::*;
use bff_core::sct::{scg_of_assignment, TraceSummary, VarSet};
use bff_core::{Registry, Word};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use std::sync::Arc;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_word(rng: &mut StdRng, max_len: usize) -> Word {
    let n = rng.gen_range(0..=max_len);
    Word::from_bytes((0..n).map(|_| if rng.gen_bool(0.5) { b'1' } else { b'0' }).collect::<Vec<_>>())
}

/// Words over {0, 1} of length at most `n`.
pub fn words_up_to(n: usize) -> Vec<Word> {
    Word::all_up_to(b"01", n)
}

const UNARY: [&str; 4] = ["pred", "suc0", "suc1", "head"];
const BINARY: [&str; 3] = ["neq", "eqw", "lmin"];

/// A random expression over `words` (and oracle calls over `oracles`).
pub fn gen_expr(rng: &mut StdRng, words: &[&str], oracles: &[&str], depth: u32) -> Expr {
    let leaf = depth == 0 || rng.gen_bool(0.35);
    if leaf {
        return match rng.gen_range(0..6) {
            0 => Expr::eps(),
            1 => Expr::new(ExprKind::Const(random_word(rng, 2))),
            _ => Expr::var(words.choose(rng).unwrap()),
        };
    }
    match rng.gen_range(0..6) {
        0 | 1 => Expr::op(UNARY.choose(rng).unwrap(), vec![gen_expr(rng, words, oracles, depth - 1)]),
        2 | 3 => Expr::op(
            BINARY.choose(rng).unwrap(),
            vec![gen_expr(rng, words, oracles, depth - 1), gen_expr(rng, words, oracles, depth - 1)],
        ),
        _ if !oracles.is_empty() => Expr::oracle(
            oracles.choose(rng).unwrap(),
            gen_expr(rng, words, oracles, depth - 1),
            gen_expr(rng, words, oracles, depth - 1),
        ),
        _ => Expr::var(words.choose(rng).unwrap()),
    }
}

/// A random statement. Loops are guarded by `x != ~` and decrease `x` at the
/// end of the body, so they terminate unless the body keeps refilling `x`.
pub fn gen_stmt(rng: &mut StdRng, words: &[&str], oracles: &[&str], depth: u32, max_len: usize) -> Stmt {
    let n = rng.gen_range(1..=max_len);
    let items = (0..n)
        .map(|_| match rng.gen_range(0..10) {
            0..=5 => {
                let x = words.choose(rng).unwrap();
                Stmt::assign(x, gen_expr(rng, words, oracles, 2))
            }
            6 if depth > 0 => Stmt::if_(
                gen_expr(rng, words, oracles, 1),
                gen_stmt(rng, words, oracles, depth - 1, 2),
                if rng.gen_bool(0.5) { Stmt::skip() } else { gen_stmt(rng, words, oracles, depth - 1, 2) },
            ),
            7 | 8 if depth > 0 => {
                let x = words.choose(rng).unwrap();
                let body = gen_stmt(rng, words, oracles, depth - 1, 2);
                let dec = Stmt::assign(x, Expr::op("pred", vec![Expr::var(x)]));
                let mut items: Vec<Stmt> = body.flatten_seq().into_iter().cloned().collect();
                items.push(dec);
                Stmt::while_(Expr::op("neq", vec![Expr::var(x), Expr::eps()]), Stmt::seq(items))
            }
            9 => Stmt::skip(),
            _ => Stmt::assign(words.choose(rng).unwrap(), Expr::var(words.choose(rng).unwrap())),
        })
        .collect();
    Stmt::seq(items)
}

/// A random rank-0 term of type W over `words` and `oracles`.
fn gen_term(rng: &mut StdRng, words: &[&str], oracles: &[&str], procs: &[(String, usize, usize)], depth: u32) -> Term {
    if depth == 0 || rng.gen_bool(0.3) {
        return Term::var(words.choose(rng).unwrap());
    }
    match rng.gen_range(0..3) {
        0 if !oracles.is_empty() => {
            Term::app(Term::var(oracles.choose(rng).unwrap()), gen_term(rng, words, oracles, procs, depth - 1))
        }
        1 if !procs.is_empty() => {
            let (name, n_or, n_w) = procs.choose(rng).unwrap();
            let closures = (0..*n_or)
                .map(|_| {
                    let mut inner: Vec<&str> = words.to_vec();
                    inner.push("w");
                    Closure::new("w", gen_term(rng, &inner, oracles, &[], depth - 1))
                })
                .collect();
            let args = (0..*n_w).map(|_| gen_term(rng, words, oracles, procs, depth - 1)).collect();
            Term::call(name, closures, args)
        }
        _ => Term::var(words.choose(rng).unwrap()),
    }
}

/// A random well-formed, normal-form program.
pub fn gen_program(rng: &mut StdRng) -> Program {
    let n_oracles = rng.gen_range(0..=2);
    let n_words = rng.gen_range(1..=3);
    let boxed_or: Vec<&str> = ["X", "Z"][..n_oracles].to_vec();
    let boxed_w: Vec<&str> = ["a", "b", "c"][..n_words].to_vec();
    let n_procs = rng.gen_range(1..=2);
    let mut procs = Vec::new();
    let mut sigs = Vec::new();
    for i in 0..n_procs {
        let name = ["P", "Q"][i];
        let n_or = rng.gen_range(0..=1);
        let or_params: Vec<&str> = ["Y"][..n_or].to_vec();
        let n_p = rng.gen_range(1..=2);
        let params: Vec<&str> = ["x", "y"][..n_p].to_vec();
        let locals: Vec<&str> = if rng.gen_bool(0.5) { vec!["z"] } else { vec![] };
        let vars: Vec<&str> = params.iter().chain(&locals).copied().collect();
        let body = gen_stmt(rng, &vars, &or_params, 2, 4);
        let ret = vars.choose(rng).unwrap();
        procs.push(Procedure::new(name, &or_params, &params, &locals, body, ret));
        sigs.push((name.to_string(), n_or, n_p));
    }
    let main = if !boxed_or.is_empty() && rng.gen_bool(0.3) {
        let body = gen_term(rng, &boxed_w, &["F"], &sigs, 3);
        Term::app(Term::lambda("F", body), Term::var(boxed_or[0]))
    } else {
        gen_term(rng, &boxed_w, &boxed_or, &sigs, 3)
    };
    let mut layers = Vec::new();
    let boxed: Vec<Ident> = boxed_or.iter().chain(&boxed_w).map(|x| Ident::new(*x)).collect();
    layers.push(Layer::Box(boxed));
    layers.push(Layer::Declare(procs));
    Program::new(layers, main)
}

/// A random procedure with at most three word variables and two loops.
/// Loop guards are arbitrary expressions.
pub fn gen_small_procedure(rng: &mut StdRng) -> Procedure {
    const VARS: [&str; 3] = ["x", "y", "z"];
    let n_vars = rng.gen_range(1..=3);
    let vars: Vec<&str> = VARS[..n_vars].to_vec();
    let oracles: Vec<&str> = if rng.gen_bool(0.3) { vec!["Y"] } else { vec![] };
    let mut loops = 0;
    let body = small_stmt(rng, &vars, &oracles, 2, &mut loops);
    Procedure::new("p", &oracles, &vars, &[], body, vars[0])
}

fn small_expr(rng: &mut StdRng, vars: &[&str], oracles: &[&str], depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.45) {
        return if rng.gen_bool(0.15) { Expr::eps() } else { Expr::var(vars.choose(rng).unwrap()) };
    }
    match rng.gen_range(0..9) {
        0 | 1 => Expr::op("pred", vec![small_expr(rng, vars, oracles, depth - 1)]),
        2 => Expr::op("suc1", vec![small_expr(rng, vars, oracles, depth - 1)]),
        3 => Expr::op("head", vec![small_expr(rng, vars, oracles, depth - 1)]),
        4 | 5 => Expr::op(
            BINARY.choose(rng).unwrap(),
            vec![small_expr(rng, vars, oracles, depth - 1), small_expr(rng, vars, oracles, depth - 1)],
        ),
        6 if !oracles.is_empty() => Expr::oracle(
            oracles[0],
            small_expr(rng, vars, oracles, depth - 1),
            small_expr(rng, vars, oracles, depth - 1),
        ),
        _ => Expr::var(vars.choose(rng).unwrap()),
    }
}

fn small_stmt(rng: &mut StdRng, vars: &[&str], oracles: &[&str], depth: u32, loops: &mut u32) -> Stmt {
    let n = rng.gen_range(1..=3);
    let items = (0..n)
        .map(|_| match rng.gen_range(0..8) {
            0..=3 => Stmt::assign(vars.choose(rng).unwrap(), small_expr(rng, vars, oracles, 2)),
            4 if depth > 0 => Stmt::if_(
                small_expr(rng, vars, oracles, 1),
                small_stmt(rng, vars, oracles, depth - 1, loops),
                Stmt::skip(),
            ),
            5 | 6 if depth > 0 && *loops < 2 => {
                *loops += 1;
                let guard = if rng.gen_bool(0.7) {
                    Expr::op("neq", vec![Expr::var(vars.choose(rng).unwrap()), Expr::eps()])
                } else {
                    small_expr(rng, vars, oracles, 1)
                };
                Stmt::while_(guard, small_stmt(rng, vars, oracles, depth - 1, loops))
            }
            _ => Stmt::assign(vars.choose(rng).unwrap(), small_expr(rng, vars, oracles, 1)),
        })
        .collect();
    Stmt::seq(items)
}

/// A random flat statement over `vars`. Each loop body holds at most
/// `per_body` assignments.
pub fn gen_flat_body(rng: &mut StdRng, vars: &[&str], depth: u32, per_body: usize) -> Stmt {
    let n = rng.gen_range(1..=per_body);
    let items = (0..n)
        .map(|_| match rng.gen_range(0..10) {
            0..=5 => flat_assignment(rng, vars),
            6 | 7 if depth > 0 => {
                let g = vars.choose(rng).unwrap();
                Stmt::while_(
                    Expr::op("neq", vec![Expr::var(g), Expr::eps()]),
                    gen_flat_body(rng, vars, depth - 1, per_body),
                )
            }
            8 if depth > 0 => Stmt::if_(
                Expr::op("neq", vec![Expr::var(vars.choose(rng).unwrap()), Expr::eps()]),
                gen_flat_body(rng, vars, depth - 1, per_body),
                if rng.gen_bool(0.5) { Stmt::skip() } else { gen_flat_body(rng, vars, depth - 1, per_body) },
            ),
            _ => flat_assignment(rng, vars),
        })
        .collect();
    Stmt::seq(items)
}

fn flat_assignment(rng: &mut StdRng, vars: &[&str]) -> Stmt {
    let x = vars.choose(rng).unwrap();
    let v = |rng: &mut StdRng| Expr::var(vars.choose(rng).unwrap());
    let e = match rng.gen_range(0..8) {
        0 | 1 => v(rng),
        2 | 3 => Expr::op("pred", vec![v(rng)]),
        4 => Expr::op("suc1", vec![v(rng)]),
        5 => Expr::op("lmin", vec![v(rng), v(rng)]),
        6 => Expr::op("head", vec![v(rng)]),
        _ => Expr::oracle("X", v(rng), v(rng)),
    };
    Stmt::assign(x, e)
}

/// SCG words of `st` up to length `max_len`, with every loop unrolled 0 to
/// `unroll` times. Each word is a list of assignment statements.
pub fn scg_words(st: &Stmt, unroll: usize, max_len: usize) -> Vec<Vec<&Stmt>> {
    use std::collections::BTreeSet;
    fn go(st: &Stmt, unroll: usize, max_len: usize) -> Vec<Vec<&Stmt>> {
        match &st.kind {
            StmtKind::Skip => vec![vec![]],
            StmtKind::Assign { .. } => vec![vec![st]],
            StmtKind::Seq(a, b) => {
                let (wa, wb) = (go(a, unroll, max_len), go(b, unroll, max_len));
                let mut out = Vec::new();
                for x in &wa {
                    for y in &wb {
                        if x.len() + y.len() <= max_len {
                            out.push(x.iter().chain(y).copied().collect());
                        }
                    }
                }
                out
            }
            StmtKind::If { then_branch, else_branch, .. } => {
                let mut out = go(then_branch, unroll, max_len);
                out.extend(go(else_branch, unroll, max_len));
                out
            }
            StmtKind::While { body, .. } => {
                let wb = go(body, unroll, max_len);
                let mut layer: Vec<Vec<&Stmt>> = vec![vec![]];
                let mut out = layer.clone();
                for _ in 0..unroll {
                    let mut next = Vec::new();
                    for x in &layer {
                        for y in &wb {
                            if x.len() + y.len() <= max_len {
                                next.push(x.iter().chain(y).copied().collect());
                            }
                        }
                    }
                    out.extend(next.iter().cloned());
                    layer = next;
                }
                out
            }
        }
    }
    let mut seen = BTreeSet::new();
    go(st, unroll, max_len)
        .into_iter()
        .filter(|w| seen.insert(w.iter().map(|s| *s as *const Stmt as usize).collect::<Vec<_>>()))
        .collect()
}

/// Union over the SCG words of `st` of their composed summaries.
pub fn enumerate_summary(st: &Stmt, vars: &Arc<VarSet>, registry: &Registry, unroll: usize, max_len: usize) -> TraceSummary {
    let mut acc: Option<TraceSummary> = None;
    for word in scg_words(st, unroll, max_len) {
        let mut s = TraceSummary::identity(vars);
        for a in word {
            let StmtKind::Assign { target, value } = &a.kind else { unreachable!() };
            let g = scg_of_assignment(target, value, vars, registry).unwrap().summary();
            s = s.compose(&g).unwrap();
        }
        acc = Some(match acc {
            None => s,
            Some(a) => a.union(&s).unwrap(),
        });
    }
    acc.unwrap_or_else(|| TraceSummary::identity(vars))
}

/// `F(f)(w) = F_{|w|}(f)` with `F_0 = ε` and
/// `F_{n+1} = f(f(F_n ↾ f("1")))`.
pub fn ks_reference(f: &dyn Fn(&Word) -> Word, w: &Word) -> Word {
    let bound = f(&Word::from("1"));
    let mut acc = Word::empty();
    for _ in 0..w.len() {
        acc = f(&f(&bound_restrict(&acc, &bound)));
    }
    acc
}

/// Truncate-or-pad written out directly: keep at most `|u|` symbols of `v`,
/// then `1`, then `0`s up to length `|u| + 1`.
pub fn bound_restrict(v: &Word, u: &Word) -> Word {
    let mut s: String = v.to_string().chars().take(u.len()).collect();
    s.push('1');
    while s.len() < u.len() + 1 {
        s.push('0');
    }
    Word::from(s.as_str())
}
