//! Parsing, evaluation and static analysis for a small imperative language
//! with second-order procedures, oracle calls and a simply typed term layer.
//!
//! The analyses decide membership in two program classes: tier-safe programs
//! (a type discipline bounding how data can flow into loop guards) and
//! programs whose loops terminate by a size-change argument.
//!
//! ```
//! use bff_core::{check_source, Options, Verdict};
//!
//! let src = r#"
//!     box [x, y] in
//!     declare add(u, v) {
//!       while (u != ~) { u := pred(u); v := suc1(v) }
//!       return v
//!     }
//!     in call add(x, y)
//! "#;
//! let report = check_source(src, &Options::default()).unwrap();
//! assert_eq!(report.verdict, Verdict::Safe0Scps);
//! ```

pub mod ast;
pub mod interp;
pub mod ops;
pub mod pipeline;
pub mod sct;
pub mod simple_types;
pub mod span;
pub mod syntax;
pub mod tier;
pub mod word;

pub use ast::{check_well_formed, normalize, FreeVars, Program};
pub use interp::{run_program, EvalMode, OracleSpec, RuntimeError};
pub use ops::Registry;
pub use pipeline::{check_program, check_source, CheckError, CheckReport, Options, Verdict};

pub use syntax::{parse_program, pretty};
pub use word::{restrict, Word};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/language.md")]
    mod language {}
    #[doc = include_str!("../../../book/src/semantics.md")]
    mod semantics {}
    #[doc = include_str!("../../../book/src/simple-types.md")]
    mod simple_types {}
    #[doc = include_str!("../../../book/src/tiers.md")]
    mod tiers {}
    #[doc = include_str!("../../../book/src/size-change.md")]
    mod size_change {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
}
