mod common;

use std::collections::BTreeSet;

use bff_core::ast::*;
use bff_core::interp::DEFAULT_FUEL;
use bff_core::syntax::{parse_program, parse_term};
use bff_core::{run_program, EvalMode, OracleSpec, Registry, Word};
use proptest::prelude::*;

fn wf(src: &str) -> Vec<Diagnostic> {
    check_well_formed(&parse_program(src).unwrap(), &Registry::builtin())
}

fn kinds(d: &[Diagnostic]) -> Vec<DiagnosticKind> {
    d.iter().map(|d| d.kind).collect()
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

#[test]
fn ce_is_well_formed() {
    assert!(wf(include_str!("../../../corpus/ce.bff")).is_empty());
}

#[test]
fn duplicate_procedure_names() {
    let d = wf("box [y] in declare P(x) { return x } P(x) { return x } in call P(y)");
    assert_eq!(kinds(&d), [DiagnosticKind::NameClash]);
}

#[test]
fn free_variable_in_body() {
    let d = wf("box [y] in declare P(x) { x := w return x } in call P(y)");
    assert_eq!(kinds(&d), [DiagnosticKind::FreeVariable]);
    assert!(d[0].message.contains('w'));
    assert!(d[0].span.line > 0);
}

#[test]
fn other_diagnostics() {
    let d = wf("box [y] in declare P(x) { return x } in call Q(y)");
    assert!(kinds(&d).contains(&DiagnosticKind::UnknownProcedure));
    let d = wf("box [y] in declare P(x) { return x } in call P(y, y)");
    assert!(kinds(&d).contains(&DiagnosticKind::CallArity));
    let d = wf("box [y] in declare P(x) { x := frob(x) return x } in call P(y)");
    assert!(kinds(&d).contains(&DiagnosticKind::UnknownOperator));
    let d = wf("box [y] in declare P(x) { x := pred(x, x) return x } in call P(y)");
    assert!(kinds(&d).contains(&DiagnosticKind::OperatorArity));
    let d = wf("box [y] in declare P(x, x) { return x } in call P(y, y)");
    assert!(kinds(&d).contains(&DiagnosticKind::DuplicateVariable));
    let d = wf("box [y] in declare P(x) { return r } in call P(y)");
    assert!(!d.is_empty());
}

#[test]
fn free_vars_of_terms() {
    let c = Closure::new("x", parse_term("X @ x").unwrap());
    assert_eq!(c.free_vars(), set(&["X"]));
    assert!(parse_term("\\a. a").unwrap().free_vars().is_empty());
    let prg = parse_program(include_str!("../../../corpus/ce.bff")).unwrap();
    assert!(prg.free_vars().is_empty());
    assert_eq!(prg.main.free_vars(), set(&["X", "y"]));
}

#[test]
fn normalize_commutes_layers() {
    let src = "box [X] in declare P(Y, x) { x := Y(x |> x) return x } in box [y] in call P({w -> X @ w}, y)";
    let prg = parse_program(src).unwrap();
    assert!(!prg.is_normal_form());
    let n = normalize(&prg).unwrap();
    assert!(n.is_normal_form());
    let expect = parse_program(
        "box [X, y] in declare P(Y, x) { x := Y(x |> x) return x } in call P({w -> X @ w}, y)",
    )
    .unwrap();
    assert_eq!(n.without_spans(), expect.without_spans());
}

#[test]
fn normal_program_is_fixpoint() {
    let prg = parse_program(include_str!("../../../corpus/ce.bff")).unwrap();
    assert_eq!(normalize(&prg).unwrap(), prg);
}

#[test]
fn normalize_requires_closed() {
    let prg = parse_program("declare P(x) { return x } in call P(y)").unwrap();
    assert!(matches!(normalize(&prg), Err(NormalizeError::NotClosed(v)) if v == ["y"]));
}

#[test]
fn declare_first_program_evaluates_alike() {
    let src = "declare P(Y, x) { var u; u := Y(x |> x); x := lmin(u, x) return x } in box [X, y] in call P({w -> X @ w}, y)";
    let prg = parse_program(src).unwrap();
    let n = normalize(&prg).unwrap();
    let reg = Registry::builtin();
    for spec in ["reverse", "dup"] {
        let f = OracleSpec::parse(spec).unwrap().to_fn();
        for w in common::words_up_to(3) {
            let a = run_program(&prg, &reg, std::slice::from_ref(&f), std::slice::from_ref(&w), DEFAULT_FUEL, EvalMode::ByName);
            let b = run_program(&n, &reg, std::slice::from_ref(&f), std::slice::from_ref(&w), DEFAULT_FUEL, EvalMode::ByName);
            assert_eq!(a, b);
        }
    }
}

#[test]
fn corpus_normalize_preserves_semantics() {
    let reg = Registry::builtin();
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus");
    let oracles: Vec<_> = ["id", "reverse", "dup", "prepend:1"].iter().map(|s| OracleSpec::parse(s).unwrap().to_fn()).collect();
    for name in ["ce", "add", "iter", "tm_parity", "ce_lambda"] {
        let prg = parse_program(&std::fs::read_to_string(format!("{dir}/{name}.bff")).unwrap()).unwrap();
        let n = normalize(&prg).unwrap();
        let boxed = prg.boxed_vars();
        let n_or = boxed.iter().filter(|v| v.kind() == VarKind::Oracle).count();
        let n_w = boxed.len() - n_or;
        let words = common::words_up_to(2);
        let mut rng = common::rng(7);
        for _ in 0..40 {
            use rand::seq::SliceRandom;
            let fs: Vec<_> = (0..n_or).map(|_| oracles.choose(&mut rng).unwrap().clone()).collect();
            let ws: Vec<Word> = (0..n_w).map(|_| words.choose(&mut rng).unwrap().clone()).collect();
            let a = run_program(&prg, &reg, &fs, &ws, DEFAULT_FUEL, EvalMode::ByName);
            let b = run_program(&n, &reg, &fs, &ws, DEFAULT_FUEL, EvalMode::ByName);
            assert_eq!(a, b, "{name}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_programs_are_closed_and_well_formed(seed in any::<u64>()) {
        let prg = common::gen_program(&mut common::rng(seed));
        let d = check_well_formed(&prg, &Registry::builtin());
        prop_assert!(d.is_empty(), "{:?}", d);
        prop_assert!(prg.free_vars().is_empty());
    }

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>()) {
        let prg = common::gen_program(&mut common::rng(seed));
        let once = normalize(&prg).unwrap();
        prop_assert_eq!(normalize(&once).unwrap().without_spans(), once.without_spans());
    }
}
