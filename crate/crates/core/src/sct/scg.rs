use std::sync::Arc;

use crate::ast::*;
use crate::ops::{OpsError, Registry};

use super::summary::{Origin, TraceSummary, VarSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScgEdge {
    pub from: usize,
    pub to: usize,
    pub down: bool,
}

/// A size-change graph from the variables before an assignment to the
/// variables after it. Each target has at most one incoming edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scg {
    vars: Arc<VarSet>,
    edges: Vec<ScgEdge>,
}

impl Scg {
    /// Panics if some target has two incoming edges.
    pub fn new(vars: Arc<VarSet>, mut edges: Vec<ScgEdge>) -> Scg {
        edges.sort();
        let mut seen = vec![false; vars.len()];
        for e in &edges {
            assert!(!seen[e.to], "size-change graph with fan-in at `{}`", vars.name(e.to));
            seen[e.to] = true;
        }
        Scg { vars, edges }
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn edges(&self) -> &[ScgEdge] {
        &self.edges
    }

    /// Edges as `(from, to, down)` names.
    pub fn named_edges(&self) -> Vec<(&str, &str, bool)> {
        self.edges.iter().map(|e| (self.vars.name(e.from), self.vars.name(e.to), e.down)).collect()
    }

    pub fn summary(&self) -> TraceSummary {
        let mut origins = vec![vec![Origin::Broken]; self.vars.len()];
        for e in &self.edges {
            origins[e.to] = vec![Origin::From { var: e.from, down: e.down }];
        }
        TraceSummary::from_origins(&self.vars, &origins)
    }
}

/// The graph of a flat assignment `target := value`, restricted to `vars`.
pub fn scg_of_assignment(target: &Ident, value: &Expr, vars: &Arc<VarSet>, registry: &Registry) -> Result<Scg, OpsError> {
    let mut edges: Vec<ScgEdge> = (0..vars.len())
        .filter(|&v| vars.name(v) != target.name)
        .map(|v| ScgEdge { from: v, to: v, down: false })
        .collect();
    let source = match &value.kind {
        ExprKind::Var(y) => Some((y, false)),
        ExprKind::Op { op, args } => {
            let info = registry.lookup(&op.name)?;
            match info.decrease {
                Some(d) => match args.get(d.index).map(|a| &a.kind) {
                    Some(ExprKind::Var(y)) => Some((y, d.strict)),
                    _ => None,
                },
                None => None,
            }
        }
        ExprKind::Const(_) | ExprKind::Oracle { .. } => None,
    };
    if let (Some(to), Some((y, down))) = (vars.index(&target.name), source) {
        if let Some(from) = vars.index(&y.name) {
            edges.push(ScgEdge { from, to, down });
        }
    }
    Ok(Scg::new(vars.clone(), edges))
}
