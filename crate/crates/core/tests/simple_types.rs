mod common;

use bff_core::simple_types::*;
use bff_core::syntax::{parse_program, pretty};
use proptest::prelude::*;

fn typed(src: &str) -> (bff_core::Program, Result<SimpleTyping, TypeError>) {
    let prg = parse_program(src).unwrap();
    let t = infer_simple(&prg);
    (prg, t)
}

fn corpus(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../corpus/{name}.bff", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn ce_type_and_rank() {
    let (prg, t) = typed(&corpus("ce"));
    let t = t.unwrap();
    assert_eq!(t.program_type, SimpleType::arrow(SimpleType::ww(), SimpleType::ww()));
    assert_eq!(t.program_type.to_string(), "(W -> W) -> W -> W");
    assert_eq!(compute_rank(&prg, &t), 0);
    assert!(is_rank0(&prg));
}

#[test]
fn rank_zero_corpus() {
    for name in ["add", "tm_parity", "iter"] {
        let (prg, t) = typed(&corpus(name));
        assert!(is_rank0(&prg), "{name}");
        assert_eq!(compute_rank(&prg, &t.unwrap()), 0, "{name}");
    }
}

#[test]
fn boxed_word_alone() {
    let (_, t) = typed("box [x] in x");
    assert_eq!(t.unwrap().program_type.to_string(), "W -> W");
}

#[test]
fn self_application() {
    let (_, t) = typed("box [X] in X @ X");
    assert!(matches!(t, Err(TypeError::Mismatch { .. })));
}

#[test]
fn lambda_ranks() {
    let (prg, t) = typed("box [y] in (\\a. a) @ y");
    assert_eq!(compute_rank(&prg, &t.unwrap()), 1);
    assert!(!is_rank0(&prg));
    let (prg, t) = typed("box [X, y] in (\\F. F @ y) @ X");
    assert_eq!(compute_rank(&prg, &t.unwrap()), 2);
    let (prg, t) = typed(&corpus("ce_lambda"));
    assert_eq!(compute_rank(&prg, &t.unwrap()), 2);
}

#[test]
fn wrapped_ce_is_rank_one() {
    let src = corpus("ce").replace("call KS(", "(\\a. a) @ call KS(").replace("y)\n", "y))\n");
    let src = src.replace("(\\a. a) @ call", "(\\a. a) @ (call");
    let (prg, t) = typed(&src);
    let t = t.unwrap();
    assert_eq!(t.program_type.to_string(), "(W -> W) -> W -> W");
    assert_eq!(compute_rank(&prg, &t), 1);
}

#[test]
fn occurs_check() {
    let (_, t) = typed("box [y] in (\\a. a @ a) @ y");
    assert!(matches!(t, Err(TypeError::OccursCheck { .. }) | Err(TypeError::Mismatch { .. })));
}

#[test]
fn program_shape() {
    let (_, t) = typed("box [y, X] in y");
    assert!(matches!(t, Err(TypeError::ProgramShape(_))));
}

#[test]
fn annotations_replay() {
    for name in ["ce", "ce_lambda", "add", "iter", "tm_parity"] {
        let (prg, t) = typed(&corpus(name));
        let t = t.unwrap();
        assert_eq!(t.annotation.len(), term_nodes(&prg.main).len());
        check_annotation(&prg, &t).unwrap();
    }
}

#[test]
fn tampered_annotation_fails_replay() {
    let (prg, t) = typed(&corpus("ce"));
    let mut t = t.unwrap();
    t.annotation[0] = SimpleType::ww();
    assert!(check_annotation(&prg, &t).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn inferred_annotations_replay(seed in any::<u64>()) {
        let prg = common::gen_program(&mut common::rng(seed));
        if let Ok(t) = infer_simple(&prg) {
            prop_assert!(check_annotation(&prg, &t).is_ok());
            prop_assert_eq!(is_rank0(&prg), compute_rank(&prg, &t) == 0);
        }
    }

    #[test]
    fn inference_survives_round_trip(seed in any::<u64>()) {
        let prg = common::gen_program(&mut common::rng(seed));
        let back = parse_program(&pretty(&prg)).unwrap();
        prop_assert_eq!(infer_simple(&prg).map(|t| t.program_type), infer_simple(&back).map(|t| t.program_type));
    }
}
