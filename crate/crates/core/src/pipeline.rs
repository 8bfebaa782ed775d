//! The full check: parse, well-formedness, simple types, tiers and loops.

use std::fmt;

use serde::Serialize;

use crate::ast::{check_well_formed, normalize, Diagnostic, NormalizeError, Program};
use crate::ops::{OpsError, Registry};
use crate::sct::{check_scps, ScpReport};
use crate::syntax::{parse_program, ParseError};
use crate::tier::{check_safe, Delta, ProcResult, SafeReport, SafeVerdict, Tier, TierEnv, TierOptions, TierTriple};

#[derive(Clone, Debug)]
pub struct Options {
    /// Solver bound; `None` means number of loops + 2, per procedure.
    pub max_tier: Option<Tier>,
    /// Only rank-0 programs meet the bar.
    pub require_rank0: bool,
    pub delta: Delta,
    pub registry: Registry,
}

impl Default for Options {
    fn default() -> Options {
        Options { max_tier: None, require_rank0: false, delta: Delta::Maximal, registry: Registry::builtin() }
    }
}

impl Options {
    pub fn tier_options(&self) -> TierOptions {
        TierOptions { max_tier: self.max_tier, delta: self.delta.clone() }
    }

    /// Whether `v` meets the bar set by these options.
    pub fn accepts(&self, v: Verdict) -> bool {
        match v {
            Verdict::Safe0Scps => true,
            Verdict::SafeScps => !self.require_rank0,
            Verdict::SafeOnly | Verdict::Rejected => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Tier-safe, rank 0, every loop accepted.
    Safe0Scps,
    /// Tier-safe, every loop accepted.
    SafeScps,
    /// Tier-safe, some loop rejected.
    SafeOnly,
    Rejected,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Safe0Scps => "safe0_scps",
            Verdict::SafeScps => "safe_scps",
            Verdict::SafeOnly => "safe_only",
            Verdict::Rejected => "rejected",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error("{}", join(.0))]
    Parse(Vec<ParseError>),
    #[error("{}", join(.0))]
    WellFormed(Vec<Diagnostic>),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Operator(#[from] OpsError),
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\n")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ProcedureEntry {
    Typed { name: String, gamma: TierEnv, triple: TierTriple },
    Unsat { name: String, unsat: bool, reason: String },
}

impl ProcedureEntry {
    pub fn name(&self) -> &str {
        match self {
            ProcedureEntry::Typed { name, .. } | ProcedureEntry::Unsat { name, .. } => name,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScpEntry {
    /// `procedure@line:col` of the loop.
    #[serde(rename = "loop")]
    pub loop_at: String,
    pub guard_var: Option<String>,
    pub accepted: bool,
    pub reason: Option<String>,
}

/// Everything the check found, in the shape of the JSON report.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    pub verdict: Verdict,
    pub simple_type: Option<String>,
    pub rank: Option<u32>,
    pub procedures: Vec<ProcedureEntry>,
    pub scp: Vec<ScpEntry>,
    #[serde(skip)]
    pub safe: SafeVerdict,
    #[serde(skip)]
    pub type_error: Option<String>,
    #[serde(skip)]
    pub scp_report: ScpReport,
}

impl CheckReport {
    pub fn with_file(mut self, file: impl Into<String>) -> CheckReport {
        self.file = Some(file.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable multi-line summary.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(f) = &self.file {
            out.push_str(&format!("file: {f}\n"));
        }
        match (&self.simple_type, &self.type_error) {
            (Some(t), _) => out.push_str(&format!("simple type: {t}\n")),
            (None, Some(e)) => out.push_str(&format!("simple type: error: {e}\n")),
            (None, None) => {}
        }
        if let Some(r) = self.rank {
            out.push_str(&format!("rank: {r}\n"));
        }
        for p in &self.procedures {
            match p {
                ProcedureEntry::Typed { name, gamma, triple } => {
                    let g: Vec<String> = gamma.iter().map(|(x, t)| format!("{x}:{t}")).collect();
                    out.push_str(&format!("tier {name}: {{{}}} {triple}\n", g.join(", ")));
                }
                ProcedureEntry::Unsat { name, reason, .. } => out.push_str(&format!("tier {name}: unsat: {reason}\n")),
            }
        }
        for l in &self.scp {
            let status = if l.accepted { "accepted".to_string() } else { format!("rejected: {}", l.reason.as_deref().unwrap_or("")) };
            out.push_str(&format!("loop {}: {status}\n", l.loop_at));
        }
        out.push_str(&format!("verdict: {}\n", self.verdict));
        out
    }
}

/// Parses and checks `src`.
pub fn check_source(src: &str, opts: &Options) -> Result<CheckReport, CheckError> {
    let prg = parse_program(src).map_err(CheckError::Parse)?;
    check_program(&prg, opts)
}

/// Checks a parsed program.
pub fn check_program(prg: &Program, opts: &Options) -> Result<CheckReport, CheckError> {
    let diags = check_well_formed(prg, &opts.registry);
    if !diags.is_empty() {
        return Err(CheckError::WellFormed(diags));
    }
    let prg = normalize(prg)?;
    let safe = check_safe(&prg, &opts.registry, &opts.tier_options());
    let scps = check_scps(&prg, &opts.registry)?;
    Ok(build_report(&safe, scps))
}

fn build_report(safe: &SafeReport, scps: ScpReport) -> CheckReport {
    let procedures = safe
        .procedures
        .iter()
        .map(|(name, r)| match r {
            ProcResult::Typed { typing, .. } => {
                ProcedureEntry::Typed { name: name.clone(), gamma: typing.gamma.clone(), triple: typing.triple }
            }
            ProcResult::Unsat { winit, wh } => ProcedureEntry::Unsat {
                name: name.clone(),
                unsat: true,
                reason: format!("outermost-reset rule: {winit}; plain rule: {wh}"),
            },
        })
        .collect();
    let scp = scps
        .loops
        .iter()
        .map(|l| ScpEntry {
            loop_at: format!("{}@{}", l.procedure, l.span),
            guard_var: l.guard_var.clone(),
            accepted: l.accepted,
            reason: l.reason.as_ref().map(|r| r.to_string()),
        })
        .collect();
    let verdict = match (safe.verdict, scps.accepted()) {
        (SafeVerdict::Safe0, true) => Verdict::Safe0Scps,
        (SafeVerdict::Safe, true) => Verdict::SafeScps,
        (SafeVerdict::Safe0 | SafeVerdict::Safe, false) => Verdict::SafeOnly,
        (SafeVerdict::NotSafe, _) => Verdict::Rejected,
    };
    CheckReport {
        file: None,
        verdict,
        simple_type: safe.simple.as_ref().ok().map(|t| t.program_type.to_string()),
        rank: safe.rank,
        procedures,
        scp,
        safe: safe.verdict,
        type_error: safe.simple.as_ref().err().map(|e| e.to_string()),
        scp_report: scps,
    }
}
