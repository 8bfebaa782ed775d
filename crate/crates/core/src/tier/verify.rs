//! Rule replay. Derivable tiers of a node are kept as a bitmask over
//! `0..=cap`: expressions get a singleton or a downward-closed interval,
//! statements an upward-closed interval.

use std::collections::BTreeMap;

use crate::ast::*;
use crate::ops::Registry;

use super::restricted::RestrictedDelta;
use super::{Delta, ProcTyping, Tier, TierEnv, TierTriple};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Set(u64);

impl Set {
    const EMPTY: Set = Set(0);

    fn single(t: Tier) -> Set {
        if t < 64 {
            Set(1 << t)
        } else {
            Set::EMPTY
        }
    }

    /// `{0, ..., m}`.
    fn upto(m: Tier) -> Set {
        if m >= 63 {
            Set(u64::MAX)
        } else {
            Set((1u64 << (m + 1)) - 1)
        }
    }

    fn and(self, o: Set) -> Set {
        Set(self.0 & o.0)
    }

    fn or(self, o: Set) -> Set {
        Set(self.0 | o.0)
    }

    fn has(self, t: Tier) -> bool {
        t < 64 && self.0 >> t & 1 == 1
    }

    fn is_empty(self) -> bool {
        self.0 == 0
    }

    fn min(self) -> Option<Tier> {
        (!self.is_empty()).then(|| self.0.trailing_zeros())
    }

    fn max(self) -> Option<Tier> {
        (!self.is_empty()).then(|| 63 - self.0.leading_zeros())
    }
}

struct Replay<'a> {
    gamma: &'a TierEnv,
    registry: &'a Registry,
    table: Option<&'a RestrictedDelta>,
    cap: Tier,
}

impl Replay<'_> {
    fn all(&self) -> Set {
        Set::upto(self.cap)
    }

    fn from(&self, t: Tier) -> Set {
        let below = if t == 0 { Set::EMPTY } else { Set::upto(t - 1) };
        Set(self.all().0 & !below.0)
    }

    fn expr(&self, e: &Expr, k_in: Tier, k_out: Tier) -> Set {
        match &e.kind {
            ExprKind::Var(x) => self.gamma.get(&x.name).map_or(Set::EMPTY, |t| Set::single(*t)),
            ExprKind::Const(_) => self.all(),
            ExprKind::Op { op, args } => {
                let sets: Vec<Set> = args.iter().map(|a| self.expr(a, k_in, k_out)).collect();
                if let Some(sigs) = self.table.and_then(|t| t.signatures(&op.name)) {
                    return sigs
                        .iter()
                        .filter(|s| s.k == k_in && s.args.iter().zip(&sets).all(|(t, set)| set.has(*t)))
                        .fold(Set::EMPTY, |acc, s| acc.or(Set::single(s.result)));
                }
                if sets.is_empty() {
                    return self.all();
                }
                let mut m = Tier::MAX;
                for s in &sets {
                    match s.and(Set::upto(k_in)).max() {
                        Some(top) => m = m.min(top),
                        None => return Set::EMPTY,
                    }
                }
                let mut out = Set::upto(m);
                if self.registry.get(&op.name).is_some_and(|i| i.is_positive()) {
                    if k_in == 0 {
                        return Set::EMPTY;
                    }
                    out = out.and(Set::upto(k_in - 1));
                }
                out
            }
            ExprKind::Oracle { data, bound, .. } => {
                let d = self.expr(data, k_in, k_out);
                if k_in == 0 || !self.expr(bound, k_in, k_out).has(k_out) {
                    return Set::EMPTY;
                }
                d.and(Set::upto((k_in - 1).min(k_out)))
            }
        }
    }

    fn stmt(&self, st: &Stmt, k_in: Tier, k_out: Tier) -> Set {
        match &st.kind {
            StmtKind::Skip => self.all(),
            StmtKind::Assign { target, value } => {
                let Some(&g) = self.gamma.get(&target.name) else { return Set::EMPTY };
                if self.expr(value, k_in, k_out).and(self.from(g)).is_empty() {
                    Set::EMPTY
                } else {
                    self.from(g)
                }
            }
            StmtKind::Seq(a, b) => self.stmt(a, k_in, k_out).and(self.stmt(b, k_in, k_out)),
            StmtKind::If { cond, then_branch, else_branch } => {
                let g = self
                    .expr(cond, k_in, k_out)
                    .and(self.stmt(then_branch, k_in, k_out))
                    .and(self.stmt(else_branch, k_in, k_out));
                g.min().map_or(Set::EMPTY, |t| self.from(t))
            }
            StmtKind::While { cond, body } => {
                let wh_guard = self.expr(cond, k_in, k_out);
                for k in 1..=self.cap {
                    let winit = k_out == 0
                        && self.expr(cond, k_in, k).has(k)
                        && self.stmt(body, k, k).has(k);
                    let wh = k <= k_out && wh_guard.has(k) && self.stmt(body, k, k_out).has(k);
                    if winit || wh {
                        return self.from(k);
                    }
                }
                Set::EMPTY
            }
        }
    }
}

fn cap_for(proc: &Procedure, gamma: &TierEnv, triple: &TierTriple) -> Tier {
    let top = gamma.values().chain([&triple.k, &triple.k_in, &triple.k_out]).copied().max().unwrap_or(0);
    (top + proc.body.while_count() as Tier + 2).min(63)
}

/// Whether the typing rules derive `triple` for the body under `gamma`,
/// with the maximal operator environment.
pub fn verify_typing(proc: &Procedure, gamma: &TierEnv, triple: &TierTriple, registry: &Registry) -> bool {
    verify_typing_with(proc, gamma, triple, registry, &Delta::Maximal)
}

pub fn verify_typing_with(
    proc: &Procedure,
    gamma: &TierEnv,
    triple: &TierTriple,
    registry: &Registry,
    delta: &Delta,
) -> bool {
    if proc.word_vars().any(|x| !gamma.contains_key(&x.name)) {
        return false;
    }
    let table = match delta {
        Delta::Maximal => None,
        Delta::Restricted(r) => Some(r),
    };
    let r = Replay { gamma, registry, table, cap: cap_for(proc, gamma, triple) };
    r.stmt(&proc.body, triple.k_in, triple.k_out).has(triple.k)
}

/// Exhaustive search over every `gamma` and triple with entries in
/// `[0, kmax]`, in lexicographic order. Exponential in the variable count.
pub fn brute_force(proc: &Procedure, kmax: Tier, registry: &Registry) -> Option<ProcTyping> {
    let vars: Vec<String> = proc.word_vars().map(|x| x.name.clone()).collect();
    let cap = (kmax + proc.body.while_count() as Tier + 2).min(63);
    let mut digits = vec![0 as Tier; vars.len()];
    loop {
        let gamma: TierEnv = vars.iter().cloned().zip(digits.iter().copied()).collect::<BTreeMap<_, _>>();
        let r = Replay { gamma: &gamma, registry, table: None, cap };
        for k_in in 0..=kmax {
            for k_out in 0..=kmax {
                let s = r.stmt(&proc.body, k_in, k_out);
                if let Some(k) = s.min().filter(|k| *k <= kmax) {
                    return Some(ProcTyping { gamma, triple: TierTriple::new(k, k_in, k_out) });
                }
            }
        }
        let mut i = 0;
        loop {
            if i == digits.len() {
                return None;
            }
            digits[i] += 1;
            if digits[i] <= kmax {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}
