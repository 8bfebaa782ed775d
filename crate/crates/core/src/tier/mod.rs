//! Tier typing of procedure bodies: constraint generation, a least-solution
//! solver, rule replay and an exhaustive reference search.

mod constraints;
mod restricted;
mod solve;
mod verify;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

pub use constraints::{gen_constraints, gen_constraints_with, Atom, ConstraintSet, LoopRecord, OpChoice, TVar, VarOrigin};
pub use restricted::{RestrictedDelta, Signature};
pub use solve::{solve, Assignment, Unsat};
pub use verify::{brute_force, verify_typing, verify_typing_with};

use crate::ast::{Procedure, Program};
use crate::ops::Registry;
use crate::simple_types::{compute_rank, infer_simple, SimpleTyping, TypeError};

pub type Tier = u32;

/// Variable tiers of one procedure.
pub type TierEnv = BTreeMap<String, Tier>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TierTriple {
    pub k: Tier,
    pub k_in: Tier,
    pub k_out: Tier,
}

impl TierTriple {
    pub fn new(k: Tier, k_in: Tier, k_out: Tier) -> TierTriple {
        TierTriple { k, k_in, k_out }
    }
}

impl fmt::Display for TierTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.k, self.k_in, self.k_out)
    }
}

/// Which while rule the outermost loops of a procedure use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Outermost loops reset the outermost tier to 0.
    Winit,
    Wh,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProcTyping {
    pub gamma: TierEnv,
    pub triple: TierTriple,
}

/// How operators are typed.
#[derive(Clone, Debug, Default)]
pub enum Delta {
    /// Every signature allowed by the safety inequalities.
    #[default]
    Maximal,
    Restricted(RestrictedDelta),
}

#[derive(Clone, Debug, Default)]
pub struct TierOptions {
    /// Solver bound; `None` means number of loops + 2.
    pub max_tier: Option<Tier>,
    pub delta: Delta,
}

pub fn default_kmax(proc: &Procedure) -> Tier {
    proc.body.while_count() as Tier + 2
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProcResult {
    Typed { typing: ProcTyping, mode: Mode },
    Unsat { winit: Unsat, wh: Unsat },
}

/// Types one procedure, trying the resetting rule for outermost loops first.
pub fn infer_procedure(proc: &Procedure, registry: &Registry, opts: &TierOptions) -> ProcResult {
    let kmax = opts.max_tier.unwrap_or_else(|| default_kmax(proc));
    let attempt = |mode| {
        let cs = gen_constraints_with(proc, registry, mode, &opts.delta);
        solve(&cs, kmax).map(|a| a.typing)
    };
    match attempt(Mode::Winit) {
        Ok(typing) => ProcResult::Typed { typing, mode: Mode::Winit },
        Err(winit) => match attempt(Mode::Wh) {
            Ok(typing) => ProcResult::Typed { typing, mode: Mode::Wh },
            Err(wh) => ProcResult::Unsat { winit, wh },
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SafeVerdict {
    Safe0,
    Safe,
    NotSafe,
}

#[derive(Clone, Debug)]
pub struct SafeReport {
    pub simple: Result<SimpleTyping, TypeError>,
    pub rank: Option<u32>,
    pub procedures: Vec<(String, ProcResult)>,
    pub verdict: SafeVerdict,
}

/// Simple typing plus tier typing of every procedure.
pub fn check_safe(prg: &Program, registry: &Registry, opts: &TierOptions) -> SafeReport {
    let simple = infer_simple(prg);
    let rank = simple.as_ref().ok().map(|t| compute_rank(prg, t));
    let procedures: Vec<(String, ProcResult)> =
        prg.procedures().into_iter().map(|p| (p.name.name.clone(), infer_procedure(p, registry, opts))).collect();
    let all_typed = procedures.iter().all(|(_, r)| matches!(r, ProcResult::Typed { .. }));
    let verdict = match (simple.is_ok() && all_typed, rank) {
        (true, Some(0)) => SafeVerdict::Safe0,
        (true, _) => SafeVerdict::Safe,
        _ => SafeVerdict::NotSafe,
    };
    SafeReport { simple, rank, procedures, verdict }
}
