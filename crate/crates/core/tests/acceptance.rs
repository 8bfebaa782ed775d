//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion.

mod common;

use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use bff_core::ast::*;
use bff_core::interp::{OracleFn, DEFAULT_FUEL};
use bff_core::sct::*;
use bff_core::syntax::{parse_procedure, parse_program};
use bff_core::tier::*;
use bff_core::*;
use common::*;
use rand::Rng;

const CE: &str = include_str!("../../../corpus/ce.bff");
const ADD: &str = include_str!("../../../corpus/add.bff");
const DOUBLE: &str = include_str!("../../../corpus/neg_doublebody.bff");

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn w(s: &str) -> Word {
    Word::from(s)
}

fn oracle(spec: &str) -> OracleFn {
    OracleSpec::parse(spec).unwrap().to_fn()
}

fn run(prg: &Program, oracles: &[OracleFn], words: &[Word], fuel: u64) -> Result<Word, RuntimeError> {
    run_program(prg, &Registry::builtin(), oracles, words, fuel, EvalMode::ByName)
}

fn c1_restrict() -> Outcome {
    let table = [(0, "1"), (1, "11"), (2, "101"), (6, "1001100")];
    let mut ok = table.iter().all(|(n, want)| restrict(&w("1001"), &Word::unary(*n)) == w(want));
    ok &= restrict(&Word::empty(), &Word::empty()) == w("1");
    let mut r = rng(1);
    let mut bad = 0;
    for _ in 0..10_000 {
        let (v, u) = (random_word(&mut r, 12), random_word(&mut r, 12));
        let got = restrict(&v, &u);
        if got.len() != u.len() + 1 || got != bound_restrict(&v, &u) {
            bad += 1;
        }
    }
    outcome(ok && bad == 0, format!("table ok: {ok}, random mismatches: {bad}/10000"))
}

fn c2_ce_pipeline() -> Outcome {
    let report = check_source(CE, &Options::default()).unwrap();
    let ty = report.simple_type.clone().unwrap_or_default();
    let ok = report.verdict == Verdict::Safe0Scps
        && report.safe == SafeVerdict::Safe0
        && report.scp_report.accepted()
        && ty == "(W -> W) -> W -> W"
        && report.rank == Some(0);
    outcome(ok, format!("verdict {}, type {ty}, rank {:?}", report.verdict, report.rank))
}

fn env(pairs: &[(&str, Tier)]) -> TierEnv {
    pairs.iter().map(|(x, t)| (x.to_string(), *t)).collect()
}

fn c3_witnesses() -> Outcome {
    let reg = Registry::builtin();
    let ce = parse_program(CE).unwrap();
    let add = parse_program(ADD).unwrap();
    let ks = ce.procedure("KS").unwrap();
    let a = add.procedure("add").unwrap();
    let ok_ce = verify_typing(ks, &env(&[("u", 1), ("v", 1), ("z", 0)]), &TierTriple::new(1, 2, 1), &reg);
    let ok_add = verify_typing(a, &env(&[("u", 1), ("v", 0)]), &TierTriple::new(1, 1, 0), &reg);
    outcome(ok_ce && ok_add, format!("ce: {ok_ce}, add: {ok_add}"))
}

fn c4_ce_semantics() -> Outcome {
    let prg = parse_program(CE).unwrap();
    let mut bad = Vec::new();
    let mut count = 0;
    for spec in ["prepend:1", "reverse", "id"] {
        let s = OracleSpec::parse(spec).unwrap();
        for input in words_up_to(4) {
            count += 1;
            let got = run(&prg, &[s.to_fn()], std::slice::from_ref(&input), DEFAULT_FUEL);
            let want = ks_reference(&|x| s.apply(x), &input);
            if got.as_ref() != Ok(&want) {
                bad.push(format!("{spec} on {input:?}"));
            }
        }
    }
    outcome(bad.is_empty(), format!("{} of {count} runs differ {:?}", bad.len(), bad))
}

fn c5_add() -> Outcome {
    let prg = parse_program(ADD).unwrap();
    let mut bad = 0;
    for i in 0..=5 {
        for j in 0..=5 {
            let out = run(&prg, &[], &[Word::unary(i), Word::unary(j)], DEFAULT_FUEL);
            if out != Ok(Word::unary(i).concat(&Word::unary(j))) {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("{bad} of 36 sums wrong"))
}

fn c6_solver() -> Outcome {
    let reg = Registry::builtin();
    let opts = TierOptions { max_tier: Some(3), delta: Delta::Maximal };
    let mut r = rng(6);
    let (mut n, mut sat, mut disagree, mut unverified) = (0, 0, 0, 0);
    while n < 1000 {
        let p = gen_small_procedure(&mut r);
        if p.node_count() > 25 {
            continue;
        }
        n += 1;
        let solved = infer_procedure(&p, &reg, &opts);
        let brute = brute_force(&p, 3, &reg);
        if let ProcResult::Typed { typing, .. } = &solved {
            sat += 1;
            if !verify_typing(&p, &typing.gamma, &typing.triple, &reg) {
                unverified += 1;
            }
        }
        if matches!(solved, ProcResult::Typed { .. }) != brute.is_some() {
            disagree += 1;
        }
    }
    outcome(
        disagree == 0 && unverified == 0,
        format!("{n} procedures, {sat} typeable, {disagree} disagreements, {unverified} unverified solutions"),
    )
}

fn loops_of(st: &Stmt) -> Vec<(&Expr, &Stmt)> {
    let mut out = Vec::new();
    st.visit(&mut |s| {
        if let StmtKind::While { cond, body } = &s.kind {
            out.push((cond, body.as_ref()));
        }
    });
    out
}

fn c7_sct() -> Outcome {
    const NAMES: [&str; 4] = ["x", "y", "z", "w"];
    let reg = Registry::builtin();
    let mut r = rng(7);
    let (mut summaries, mut loops, mut loop_bad) = (0, 0, 0);
    for _ in 0..500 {
        let names = &NAMES[..r.gen_range(1..=4)];
        let vs: Arc<VarSet> = VarSet::new(names.iter().map(|s| s.to_string()));
        let body = gen_flat_body(&mut r, names, 2, 2);
        if summarize(&body, &vs, &reg).unwrap() != enumerate_summary(&body, &vs, &reg, 3, 6) {
            summaries += 1;
        }
        for (cond, lb) in loops_of(&body) {
            loops += 1;
            let x = canonical_guard(cond).unwrap();
            let a = loop_reason(&summarize(lb, &vs, &reg).unwrap(), &x.name).is_none();
            let b = loop_reason(&enumerate_summary(lb, &vs, &reg, 3, 6), &x.name).is_none();
            if a != b {
                loop_bad += 1;
            }
        }
    }
    outcome(
        summaries == 0 && loop_bad == 0,
        format!("500 bodies: {summaries} summary mismatches; {loops} loops: {loop_bad} acceptance mismatches"),
    )
}

fn c8_negatives() -> Outcome {
    let reg = Registry::builtin();
    let prg = parse_program(DOUBLE).unwrap();
    let report = check_scps(&prg, &reg).unwrap();
    let first = &report.loops[0];
    let reason = first.reason.as_ref().map(|r| r.to_string()).unwrap_or_default();
    let seq_ok = !first.accepted && reason.starts_with("missing down-thread");
    let p = parse_procedure("p(x) { while (x != ~) { x := suc1(x) } return x }").unwrap();
    let opts = TierOptions { max_tier: Some(3), delta: Delta::Maximal };
    let solver_unsat = matches!(infer_procedure(&p, &reg, &opts), ProcResult::Unsat { .. });
    let brute_unsat = brute_force(&p, 3, &reg).is_none();
    outcome(
        seq_ok && solver_unsat && brute_unsat,
        format!("doubled body: {reason}; suc1 loop unsat: solver {solver_unsat}, brute force {brute_unsat}"),
    )
}

fn corpus_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn c9_termination() -> Outcome {
    let specs = ["id", "reverse", "dup", "lenones", "const:", "const:1", "prepend:1", "prepend:0"];
    let words = words_up_to(4);
    let (mut programs, mut runs, mut exhausted, mut errors) = (0, 0u64, 0, 0);
    let mut entries: Vec<_> = std::fs::read_dir(corpus_dir()).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for path in entries {
        if path.extension().is_none_or(|e| e != "bff") {
            continue;
        }
        let src = std::fs::read_to_string(&path).unwrap();
        let Ok(report) = check_source(&src, &Options::default()) else { continue };
        if !matches!(report.verdict, Verdict::Safe0Scps | Verdict::SafeScps) {
            continue;
        }
        programs += 1;
        let prg = parse_program(&src).unwrap();
        let boxed = prg.boxed_vars();
        let n_oracles = boxed.iter().filter(|v| v.kind() == VarKind::Oracle).count();
        let n_words = boxed.len() - n_oracles;
        for combo in 0..specs.len().pow(n_oracles as u32) {
            let oracles: Vec<OracleFn> =
                (0..n_oracles).map(|i| oracle(specs[combo / specs.len().pow(i as u32) % specs.len()])).collect();
            for idx in 0..words.len().pow(n_words as u32) {
                let args: Vec<Word> =
                    (0..n_words).map(|i| words[idx / words.len().pow(i as u32) % words.len()].clone()).collect();
                runs += 1;
                match run(&prg, &oracles, &args, 10_000_000) {
                    Ok(_) => {}
                    Err(RuntimeError::FuelExhausted) => exhausted += 1,
                    Err(_) => errors += 1,
                }
            }
        }
    }
    outcome(
        programs > 0 && exhausted == 0 && errors == 0,
        format!("{programs} programs, {runs} runs, {exhausted} fuel exhaustions, {errors} runtime errors"),
    )
}

/// A procedure of straight-line code and loops with about `nodes` AST nodes.
fn synthetic(nodes: usize) -> String {
    let blocks = [
        "while (x != ~) { x := pred(x); y := suc1(y) };",
        "z := lmin(y, z);",
        "if (z != ~) { w := head(z) } else { w := pred(w) };",
        "y := suc0(pred(y));",
        "while (w != ~) { w := pred(w); z := X1(y |> x) };",
    ];
    let wrap = |body: &str| {
        format!("box [X, a, b, c, d] in declare p(X1, x, y, z, w) {{ {body} return y }} in call p({{v -> X @ v}}, a, b, c, d)")
    };
    let mut body = String::new();
    let mut i = 0;
    loop {
        let prg = parse_program(&wrap(&body)).unwrap();
        if prg.node_count() >= nodes {
            return wrap(&body);
        }
        let step = (nodes - prg.node_count()) / 12 + 1;
        for _ in 0..step {
            body.push_str(blocks[i % blocks.len()]);
            i += 1;
        }
    }
}

fn median_check(src: &str) -> Duration {
    let mut times: Vec<Duration> = (0..3)
        .map(|_| {
            let t = Instant::now();
            check_source(src, &Options::default()).unwrap();
            t.elapsed()
        })
        .collect();
    times.sort();
    times[1]
}

fn c10_scaling() -> Outcome {
    let sizes = [1000usize, 2000, 4000, 8000];
    let times: Vec<f64> = sizes.iter().map(|n| median_check(&synthetic(*n)).as_secs_f64()).collect();
    let big = synthetic(10_000);
    let t = Instant::now();
    let verdict = check_source(&big, &Options::default()).unwrap().verdict;
    let big_time = t.elapsed();
    let xs: Vec<f64> = sizes.iter().map(|n| (*n as f64).ln()).collect();
    let ys: Vec<f64> = times.iter().map(|t| t.max(1e-6).ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    let cubic_ok = times[3] <= 2.0 * times[0] * 8f64.powi(3);
    let ok = big_time < Duration::from_secs(10) && slope <= 3.0 && cubic_ok;
    let shown: Vec<String> = times.iter().map(|t| format!("{:.1}ms", t * 1e3)).collect();
    outcome(
        ok,
        format!("10k nodes in {big_time:.2?} ({verdict}); 1k..8k medians {}; fitted exponent {slope:.2}", shown.join(", ")),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("restrict kernel", c1_restrict, Some(Duration::from_secs(1))),
        ("ce pipeline", c2_ce_pipeline, Some(Duration::from_secs(1))),
        ("typing witnesses", c3_witnesses, Some(Duration::from_secs(1))),
        ("ce semantics", c4_ce_semantics, Some(Duration::from_secs(5))),
        ("add correctness", c5_add, Some(Duration::from_secs(5))),
        ("tier solver vs brute force", c6_solver, Some(Duration::from_secs(60))),
        ("size-change algebra vs enumeration", c7_sct, Some(Duration::from_secs(60))),
        ("negative examples", c8_negatives, None),
        ("termination smoke", c9_termination, None),
        ("scaling", c10_scaling, None),
    ];
    let failed = std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(move || {
            let mut failed = Vec::new();
            for (i, (name, f, limit)) in criteria.iter().enumerate() {
                let t = Instant::now();
                let out = f();
                let elapsed = t.elapsed();
                let in_time = limit.is_none_or(|l| elapsed < l);
                let pass = out.ok && in_time;
                writeln!(
                    std::io::stderr(),
                    "criterion {:>2} {}: {name}: {} [{elapsed:.2?}]",
                    i + 1,
                    if pass { "PASS" } else { "FAIL" },
                    out.detail
                )
                .unwrap();
                if !pass {
                    failed.push(i + 1);
                }
            }
            failed
        })
        .unwrap()
        .join()
        .unwrap();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
