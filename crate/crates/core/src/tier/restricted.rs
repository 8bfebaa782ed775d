use std::collections::BTreeMap;

use serde::Deserialize;

use crate::ops::{admissible_signature, OpsError, Registry};

use super::constraints::{Atom, ConstraintSet};
use super::solve::{solve_extra, Assignment, Unsat};
use super::Tier;

/// `k̄ -> result` allowed when the innermost tier is `k`.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Signature {
    pub k: Tier,
    pub args: Vec<Tier>,
    pub result: Tier,
}

/// A finite operator typing table. Operators without an entry keep every
/// signature allowed by the safety inequalities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RestrictedDelta {
    table: BTreeMap<String, Vec<Signature>>,
}

#[derive(Deserialize)]
struct DeltaFile {
    #[serde(default)]
    signature: Vec<Entry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    op: String,
    k: Tier,
    args: Vec<Tier>,
    result: Tier,
}

impl RestrictedDelta {
    pub fn new() -> RestrictedDelta {
        RestrictedDelta::default()
    }

    /// Adds a signature after checking it is safe for `op`.
    pub fn allow(&mut self, registry: &Registry, op: &str, sig: Signature) -> Result<(), OpsError> {
        let info = registry.lookup(op)?;
        if sig.args.len() != info.arity {
            return Err(OpsError::ArityMismatch { name: op.to_string(), expected: info.arity, found: sig.args.len() });
        }
        if !admissible_signature(info, &sig.args, sig.result, sig.k) {
            return Err(OpsError::Config(format!("signature {:?} -> {} at {} is unsafe for `{op}`", sig.args, sig.result, sig.k)));
        }
        self.table.entry(op.to_string()).or_default().push(sig);
        Ok(())
    }

    pub fn signatures(&self, op: &str) -> Option<&[Signature]> {
        self.table.get(op).map(Vec::as_slice)
    }

    /// Reads `[[signature]]` tables (`op`, `k`, `args`, `result`); other
    /// top-level keys are ignored.
    pub fn from_toml(registry: &Registry, text: &str) -> Result<RestrictedDelta, OpsError> {
        let file: DeltaFile = toml::from_str(text).map_err(|e| OpsError::Config(e.to_string()))?;
        let mut d = RestrictedDelta::new();
        for e in file.signature {
            d.allow(registry, &e.op, Signature { k: e.k, args: e.args, result: e.result })?;
        }
        Ok(d)
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// Depth-first search over table signatures for each occurrence, pruning
/// with the difference-constraint solver. Returns the first solution found.
pub(super) fn solve_choices(cs: &ConstraintSet, kmax: Tier) -> Result<Assignment, Unsat> {
    fn go(cs: &ConstraintSet, i: usize, fixed: &mut Vec<Atom>, kmax: Tier) -> Result<Assignment, Unsat> {
        let current = solve_extra(cs, fixed, kmax)?;
        let Some(choice) = cs.choices.get(i) else {
            return Ok(current);
        };
        for sig in &choice.options {
            let mark = fixed.len();
            fixed.push(Atom::Fix(choice.k_in, sig.k));
            fixed.push(Atom::Fix(choice.node, sig.result));
            fixed.extend(choice.args.iter().zip(&sig.args).map(|(a, t)| Atom::Fix(*a, *t)));
            if let Ok(a) = go(cs, i + 1, fixed, kmax) {
                return Ok(a);
            }
            fixed.truncate(mark);
        }
        Err(Unsat::NoSignatures)
    }
    go(cs, 0, &mut Vec::new(), kmax)
}
