use crate::ast::*;

const INDENT: &str = "  ";

fn names(ids: &[Ident]) -> String {
    ids.iter().map(|i| i.name.as_str()).collect::<Vec<_>>().join(", ")
}

fn infix(op: &str) -> Option<&'static str> {
    match op {
        "neq" => Some("!="),
        "eqw" => Some("=="),
        _ => None,
    }
}

fn is_infix(e: &Expr) -> bool {
    matches!(&e.kind, ExprKind::Op { op, args } if args.len() == 2 && infix(&op.name).is_some())
}

pub fn pretty_expr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Var(x) => x.name.clone(),
        ExprKind::Const(w) => format!("\"{w}\""),
        ExprKind::Op { op, args } if op.name == "eps" && args.is_empty() => "~".to_string(),
        ExprKind::Op { op, args } if is_infix(e) => {
            let side = |a: &Expr| if is_infix(a) { format!("({})", pretty_expr(a)) } else { pretty_expr(a) };
            format!("{} {} {}", side(&args[0]), infix(&op.name).unwrap(), side(&args[1]))
        }
        ExprKind::Op { op, args } => {
            format!("{}({})", op.name, args.iter().map(pretty_expr).collect::<Vec<_>>().join(", "))
        }
        ExprKind::Oracle { oracle, data, bound } => {
            format!("{}({} |> {})", oracle.name, pretty_expr(data), pretty_expr(bound))
        }
    }
}

fn write_stmts(s: &Stmt, depth: usize, out: &mut String) {
    let items = s.flatten_seq();
    for (i, item) in items.iter().enumerate() {
        write_stmt(item, depth, out);
        if i + 1 < items.len() {
            out.push(';');
        }
        out.push('\n');
    }
}

fn write_block(s: &Stmt, depth: usize, out: &mut String) {
    out.push_str("{\n");
    write_stmts(s, depth + 1, out);
    out.push_str(&INDENT.repeat(depth));
    out.push('}');
}

fn write_stmt(s: &Stmt, depth: usize, out: &mut String) {
    out.push_str(&INDENT.repeat(depth));
    match &s.kind {
        StmtKind::Skip => out.push_str("skip"),
        StmtKind::Assign { target, value } => {
            out.push_str(&format!("{} := {}", target.name, pretty_expr(value)));
        }
        StmtKind::Seq(..) => unreachable!("sequences are flattened by the caller"),
        StmtKind::If { cond, then_branch, else_branch } => {
            out.push_str(&format!("if ({}) ", pretty_expr(cond)));
            write_block(then_branch, depth, out);
            out.push_str(" else ");
            write_block(else_branch, depth, out);
        }
        StmtKind::While { cond, body } => {
            out.push_str(&format!("while ({}) ", pretty_expr(cond)));
            write_block(body, depth, out);
        }
    }
}

pub fn pretty_stmt(s: &Stmt) -> String {
    let mut out = String::new();
    write_stmts(s, 0, &mut out);
    out
}

fn write_procedure(p: &Procedure, depth: usize, out: &mut String) {
    let pad = INDENT.repeat(depth);
    let params: Vec<Ident> = p.oracle_params.iter().chain(&p.word_params).cloned().collect();
    out.push_str(&format!("{pad}{}({}) {{\n", p.name.name, names(&params)));
    if !p.locals.is_empty() {
        out.push_str(&format!("{pad}{INDENT}var {};\n", names(&p.locals)));
    }
    if !matches!(p.body.kind, StmtKind::Skip) {
        write_stmts(&p.body, depth + 1, out);
    }
    out.push_str(&format!("{pad}{INDENT}return {}\n{pad}}}\n", p.ret.name));
}

pub fn pretty_procedure(p: &Procedure) -> String {
    let mut out = String::new();
    write_procedure(p, 0, &mut out);
    out
}

fn term_atom(t: &Term) -> String {
    match &t.kind {
        TermKind::Var(_) | TermKind::Call { .. } => pretty_term(t),
        _ => format!("({})", pretty_term(t)),
    }
}

pub fn pretty_term(t: &Term) -> String {
    match &t.kind {
        TermKind::Var(x) => x.name.clone(),
        TermKind::Lambda(x, b) => format!("\\{}. {}", x.name, pretty_term(b)),
        TermKind::App(f, a) => {
            let head = match f.kind {
                TermKind::App(..) => pretty_term(f),
                _ => term_atom(f),
            };
            format!("{head} @ {}", term_atom(a))
        }
        TermKind::Call { proc, closures, args } => {
            let mut parts: Vec<String> =
                closures.iter().map(|c| format!("{{{} -> {}}}", c.param.name, pretty_term(&c.body))).collect();
            parts.extend(args.iter().map(pretty_term));
            format!("call {}({})", proc.name, parts.join(", "))
        }
    }
}

/// Renders a program as parseable source text.
pub fn pretty(prg: &Program) -> String {
    let mut out = String::new();
    for layer in &prg.layers {
        match layer {
            Layer::Box(vars) => out.push_str(&format!("box [{}] in\n", names(vars))),
            Layer::Declare(procs) => {
                out.push_str("declare\n");
                for p in procs {
                    write_procedure(p, 1, &mut out);
                }
                out.push_str("in\n");
            }
        }
    }
    out.push_str(&pretty_term(&prg.main));
    out.push('\n');
    out
}
