use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// An ordered variable set shared by graphs and summaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl VarSet {
    pub fn new(names: impl IntoIterator<Item = String>) -> Arc<VarSet> {
        let mut v = VarSet { names: Vec::new(), index: HashMap::new() };
        for n in names {
            if !v.index.contains_key(&n) {
                v.index.insert(n.clone(), v.names.len());
                v.names.push(n);
            }
        }
        Arc::new(v)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("summaries over different variable sets")]
pub struct VariableSetMismatch;

/// Where the value of a variable at the end of a trace came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    /// From variable `var` at the start; `down` when a strict decrease occurred.
    From { var: usize, down: bool },
    /// No non-increasing path back to the start.
    Broken,
}

const EVEN: u64 = 0x5555_5555_5555_5555;

/// For each variable, the set of origins over a set of SCG words. Bit
/// `2u + d` encodes `From { var: u, down: d }`, bit `2n` encodes `Broken`.
#[derive(Clone, PartialEq, Eq)]
pub struct TraceSummary {
    vars: Arc<VarSet>,
    stride: usize,
    bits: Vec<u64>,
}

impl fmt::Debug for TraceSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for v in 0..self.vars.len() {
            let origins: Vec<String> = self
                .origins(v)
                .into_iter()
                .map(|o| match o {
                    Origin::Broken => "broken".to_string(),
                    Origin::From { var, down } => format!("{}{}", self.vars.name(var), if down { "↓" } else { "" }),
                })
                .collect();
            m.entry(&self.vars.name(v), &origins);
        }
        m.finish()
    }
}

impl TraceSummary {
    fn blank(vars: &Arc<VarSet>) -> TraceSummary {
        let stride = (2 * vars.len() + 1).div_ceil(64);
        TraceSummary { vars: vars.clone(), stride, bits: vec![0; stride * vars.len()] }
    }

    fn broken_bit(&self) -> usize {
        2 * self.vars.len()
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.stride..(v + 1) * self.stride]
    }

    fn set(&mut self, v: usize, bit: usize) {
        self.bits[v * self.stride + bit / 64] |= 1 << (bit % 64);
    }

    /// `v ↦ {(v, plain)}`.
    pub fn identity(vars: &Arc<VarSet>) -> TraceSummary {
        let mut s = TraceSummary::blank(vars);
        for v in 0..vars.len() {
            s.set(v, 2 * v);
        }
        s
    }

    /// Builds a summary from explicit origin sets.
    pub fn from_origins(vars: &Arc<VarSet>, origins: &[Vec<Origin>]) -> TraceSummary {
        let mut s = TraceSummary::blank(vars);
        for (v, os) in origins.iter().enumerate() {
            for o in os {
                let bit = match *o {
                    Origin::Broken => s.broken_bit(),
                    Origin::From { var, down } => 2 * var + down as usize,
                };
                s.set(v, bit);
            }
        }
        s
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn origins(&self, v: usize) -> Vec<Origin> {
        let n = self.vars.len();
        let mut out = Vec::new();
        for (w, word) in self.row(v).iter().enumerate() {
            let mut word = *word;
            while word != 0 {
                let bit = w * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                out.push(if bit == 2 * n { Origin::Broken } else { Origin::From { var: bit / 2, down: bit % 2 == 1 } });
            }
        }
        out
    }

    pub fn origins_of(&self, name: &str) -> Option<Vec<Origin>> {
        self.vars.index(name).map(|v| self.origins(v))
    }

    fn check(&self, other: &TraceSummary) -> Result<(), VariableSetMismatch> {
        if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            Ok(())
        } else {
            Err(VariableSetMismatch)
        }
    }

    /// Pointwise union.
    pub fn union(&self, other: &TraceSummary) -> Result<TraceSummary, VariableSetMismatch> {
        self.check(other)?;
        let mut out = self.clone();
        out.bits.iter_mut().zip(&other.bits).for_each(|(a, b)| *a |= b);
        Ok(out)
    }

    /// `self` followed by `then`.
    pub fn compose(&self, then: &TraceSummary) -> Result<TraceSummary, VariableSetMismatch> {
        self.check(then)?;
        let n = self.vars.len();
        let broken = self.broken_bit();
        let (bw, bm) = (broken / 64, 1u64 << (broken % 64));
        let mut out = TraceSummary::blank(&self.vars);
        let mut acc = vec![0u64; self.stride];
        for v in 0..n {
            acc.iter_mut().for_each(|a| *a = 0);
            for o in then.origins(v) {
                match o {
                    Origin::Broken => acc[bw] |= bm,
                    Origin::From { var, down } => {
                        let src = self.row(var);
                        for (i, (a, s)) in acc.iter_mut().zip(src).enumerate() {
                            let mut s = *s;
                            if down {
                                let keep_broken = if i == bw { s & bm } else { 0 };
                                s &= !keep_broken;
                                s = ((s & EVEN) << 1) | (s & !EVEN) | keep_broken;
                            }
                            *a |= s;
                        }
                    }
                }
            }
            out.bits[v * self.stride..(v + 1) * self.stride].copy_from_slice(&acc);
        }
        Ok(out)
    }

    /// Least `s*` with `s* = id ∪ s*·s`.
    pub fn star(&self) -> TraceSummary {
        let id = TraceSummary::identity(&self.vars);
        let mut acc = id.clone();
        loop {
            let next = id.union(&acc.compose(self).unwrap()).unwrap();
            if next == acc {
                return acc;
            }
            acc = next;
        }
    }
}
