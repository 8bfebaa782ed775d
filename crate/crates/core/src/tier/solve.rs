use std::collections::VecDeque;
use std::fmt;

use super::constraints::{Atom, ConstraintSet, TVar};
use super::{ProcTyping, Tier, TierTriple};

/// Why a constraint set has no solution within the bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Unsat {
    /// A chain of constraints forcing strict growth around a loop.
    Cycle(Vec<String>),
    /// A variable forced above the bound, with the chain that forced it.
    ExceedsBound { var: String, kmax: Tier, chain: Vec<String> },
    /// A variable that must be 0 forced upwards.
    NotZero { var: String, chain: Vec<String> },
    /// No combination of table signatures is consistent.
    NoSignatures,
}

impl fmt::Display for Unsat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unsat::Cycle(c) => write!(f, "strictly increasing cycle: {}", c.join(" -> ")),
            Unsat::ExceedsBound { var, kmax, chain } => {
                write!(f, "{var} exceeds the bound {kmax} via {}", chain.join(" -> "))
            }
            Unsat::NotZero { var, chain } => write!(f, "{var} must be 0 but is forced up via {}", chain.join(" -> ")),
            Unsat::NoSignatures => write!(f, "no consistent choice of operator signatures"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub values: Vec<Tier>,
    pub typing: ProcTyping,
}

impl Assignment {
    pub fn value(&self, v: TVar) -> Tier {
        self.values[v.0 as usize]
    }
}

pub(super) fn edges(cs: &ConstraintSet, extra: &[Atom]) -> Vec<Vec<(usize, i64)>> {
    let n = cs.var_count();
    let zero = n;
    let mut adj = vec![Vec::new(); n + 1];
    for atom in cs.atoms.iter().chain(extra) {
        match *atom {
            Atom::Le { a, b, offset } => adj[a.0 as usize].push((b.0 as usize, offset as i64)),
            Atom::Zero(a) => adj[a.0 as usize].push((zero, 0)),
            Atom::AtLeastOne(a) => adj[zero].push((a.0 as usize, 1)),
            Atom::Fix(a, c) => {
                adj[zero].push((a.0 as usize, c as i64));
                adj[a.0 as usize].push((zero, -(c as i64)));
            }
        }
    }
    adj
}

/// Pointwise-least solution of `cs` with every variable in `[0, kmax]`.
///
/// Sets with table-typed operator occurrences are solved by search and the
/// result is the first solution found rather than the least one.
pub fn solve(cs: &ConstraintSet, kmax: Tier) -> Result<Assignment, Unsat> {
    if !cs.choices.is_empty() {
        return super::restricted::solve_choices(cs, kmax);
    }
    solve_extra(cs, &[], kmax)
}

pub(super) fn solve_extra(cs: &ConstraintSet, extra: &[Atom], kmax: Tier) -> Result<Assignment, Unsat> {
    let adj = edges(cs, extra);
    let n = cs.var_count();
    let zero = n;
    let mut val = vec![0i64; n + 1];
    let mut pred = vec![usize::MAX; n + 1];
    let mut queued = vec![true; n + 1];
    let mut queue: VecDeque<usize> = (0..=n).collect();
    while let Some(u) = queue.pop_front() {
        queued[u] = false;
        for &(v, w) in &adj[u] {
            if val[u] + w > val[v] {
                val[v] = val[u] + w;
                pred[v] = u;
                if v == zero || val[v] > kmax as i64 {
                    return Err(witness(cs, &pred, v, kmax));
                }
                if !queued[v] {
                    queued[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    let values: Vec<Tier> = val[..n].iter().map(|&v| v as Tier).collect();
    let typing = ProcTyping {
        gamma: cs.gamma.iter().map(|(x, v)| (x.clone(), values[v.0 as usize])).collect(),
        triple: TierTriple::new(values[cs.k.0 as usize], values[cs.k_in.0 as usize], values[cs.k_out.0 as usize]),
    };
    Ok(Assignment { values, typing })
}

fn witness(cs: &ConstraintSet, pred: &[usize], start: usize, kmax: Tier) -> Unsat {
    let zero = cs.var_count();
    let name = |v: usize| if v == zero { "0".to_string() } else { cs.describe(TVar(v as u32)) };
    let mut chain = vec![start];
    let mut cur = start;
    while pred[cur] != usize::MAX {
        cur = pred[cur];
        if let Some(pos) = chain.iter().position(|&c| c == cur) {
            let cycle = std::iter::once(cur).chain(chain[pos..].iter().rev().copied()).map(name).collect();
            return Unsat::Cycle(cycle);
        }
        chain.push(cur);
    }
    let chain: Vec<String> = chain.iter().rev().map(|&v| name(v)).collect();
    if start == zero {
        Unsat::NotZero { var: name(pred[zero]), chain }
    } else {
        Unsat::ExceedsBound { var: name(start), kmax, chain }
    }
}
