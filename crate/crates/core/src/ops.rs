//! Operator registry: semantics plus the neutral/positive and decrease
//! classification used by tier typing and size-change analysis.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::word::{Alphabet, Word};

pub type Semantics = Arc<dyn Fn(&[Word]) -> Word + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Category {
    Neutral,
    Positive(usize),
}

/// Decrease metadata. `index` is zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decrease {
    pub index: usize,
    pub strict: bool,
}

#[derive(Clone)]
pub struct OperatorInfo {
    pub name: String,
    pub arity: usize,
    pub category: Category,
    pub decrease: Option<Decrease>,
    pub semantics: Semantics,
}

impl fmt::Debug for OperatorInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorInfo")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .field("category", &self.category)
            .field("decrease", &self.decrease)
            .finish_non_exhaustive()
    }
}

impl OperatorInfo {
    pub fn new(
        name: &str,
        arity: usize,
        category: Category,
        decrease: Option<Decrease>,
        semantics: impl Fn(&[Word]) -> Word + Send + Sync + 'static,
    ) -> OperatorInfo {
        OperatorInfo { name: name.to_string(), arity, category, decrease, semantics: Arc::new(semantics) }
    }

    pub fn apply(&self, args: &[Word]) -> Word {
        (self.semantics)(args)
    }

    pub fn is_positive(&self) -> bool {
        matches!(self.category, Category::Positive(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpsError {
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("operator `{name}` expects {expected} argument(s), got {found}")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("operator `{0}` is already registered")]
    DuplicateOperator(String),
    #[error("sample count must be positive")]
    ZeroSamples,
    #[error("operator `{name}` contradicts its declared classification on {args:?}")]
    Inconsistent { name: String, args: Vec<Word> },
    #[error("invalid operator config: {0}")]
    Config(String),
}

/// Name-indexed operators plus the alphabet they work over.
#[derive(Clone, Debug)]
pub struct Registry {
    ops: BTreeMap<String, OperatorInfo>,
    alphabet: Alphabet,
}

impl Default for Registry {
    fn default() -> Self {
        Registry::builtin()
    }
}

fn strict(index: usize) -> Option<Decrease> {
    Some(Decrease { index, strict: true })
}

fn weak(index: usize) -> Option<Decrease> {
    Some(Decrease { index, strict: false })
}

impl Registry {
    pub fn empty(alphabet: Alphabet) -> Registry {
        Registry { ops: BTreeMap::new(), alphabet }
    }

    /// eps, pred, suc0, suc1, head, neq, eqw, lmin over `{0,1}`.
    pub fn builtin() -> Registry {
        let mut r = Registry::empty(Alphabet::binary());
        let builtins = [
            OperatorInfo::new("eps", 0, Category::Neutral, None, |_| Word::empty()),
            OperatorInfo::new("pred", 1, Category::Neutral, strict(0), |a| {
                Word::from_bytes(a[0].as_bytes().get(1..).unwrap_or_default())
            }),
            OperatorInfo::new("suc0", 1, Category::Positive(1), None, |a| Word::from("0").concat(&a[0])),
            OperatorInfo::new("suc1", 1, Category::Positive(1), None, |a| Word::from("1").concat(&a[0])),
            OperatorInfo::new("head", 1, Category::Neutral, weak(0), |a| a[0].prefix(1)),
            OperatorInfo::new("neq", 2, Category::Neutral, None, |a| Word::bit(a[0] != a[1])),
            OperatorInfo::new("eqw", 2, Category::Neutral, None, |a| Word::bit(a[0] == a[1])),
            OperatorInfo::new("lmin", 2, Category::Neutral, weak(1), |a| {
                if a[0].len() < a[1].len() {
                    a[0].clone()
                } else {
                    a[1].clone()
                }
            }),
        ];
        for op in builtins {
            r.ops.insert(op.name.clone(), op);
        }
        r
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn set_alphabet(&mut self, alphabet: Alphabet) {
        self.alphabet = alphabet;
    }

    pub fn get(&self, name: &str) -> Option<&OperatorInfo> {
        self.ops.get(name)
    }

    pub fn lookup(&self, name: &str) -> Result<&OperatorInfo, OpsError> {
        self.get(name).ok_or_else(|| OpsError::UnknownOperator(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.ops.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &OperatorInfo> {
        self.ops.values()
    }

    /// Adds an operator after a sampling check of its declared classification.
    pub fn register(&mut self, info: OperatorInfo) -> Result<(), OpsError> {
        if self.ops.contains_key(&info.name) {
            return Err(OpsError::DuplicateOperator(info.name));
        }
        let report = validate_category(&info, &self.alphabet, 2000, &mut rand::thread_rng())?;
        if let Some(args) = report.counterexamples.into_iter().next() {
            return Err(OpsError::Inconsistent { name: info.name, args });
        }
        self.ops.insert(info.name.clone(), info);
        Ok(())
    }

    pub fn apply(&self, name: &str, args: &[Word]) -> Result<Word, OpsError> {
        let op = self.lookup(name)?;
        if op.arity != args.len() {
            return Err(OpsError::ArityMismatch { name: name.to_string(), expected: op.arity, found: args.len() });
        }
        Ok(op.apply(args))
    }
}

/// Result of a sampling check: argument tuples that contradict the declared
/// classification. Empty means no contradiction was found.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CategoryReport {
    pub samples: usize,
    pub counterexamples: Vec<Vec<Word>>,
}

impl CategoryReport {
    pub fn is_consistent(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

fn random_word(alphabet: &[u8], rng: &mut impl Rng) -> Word {
    let len = rng.gen_range(0..=16);
    Word::from_bytes((0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect::<Vec<_>>())
}

fn sample_ok(info: &OperatorInfo, args: &[Word]) -> bool {
    let out = info.apply(args);
    let category_ok = match info.category {
        Category::Neutral => {
            info.arity == 0
                || out == Word::from("0")
                || out == Word::from("1")
                || args.iter().any(|a| out.is_subword_of(a))
        }
        Category::Positive(c) => out.len() <= args.iter().map(Word::len).max().unwrap_or(0) + c,
    };
    let decrease_ok = match info.decrease {
        None => true,
        Some(d) => {
            if args.iter().all(Word::is_empty) {
                out.is_empty()
            } else if d.strict {
                out.len() < args[d.index].len()
            } else {
                out.len() <= args[d.index].len()
            }
        }
    };
    category_ok && decrease_ok
}

/// Checks the declared category and decrease of `info` against `samples`
/// random argument tuples (word lengths up to 16), plus the all-empty tuple.
pub fn validate_category(
    info: &OperatorInfo,
    alphabet: &Alphabet,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<CategoryReport, OpsError> {
    if samples == 0 {
        return Err(OpsError::ZeroSamples);
    }
    if let Some(d) = info.decrease {
        if d.index >= info.arity {
            return Ok(CategoryReport { samples: 0, counterexamples: vec![vec![]] });
        }
    }
    let symbols = alphabet.symbols();
    let mut report = CategoryReport { samples, counterexamples: Vec::new() };
    let empty = vec![Word::empty(); info.arity];
    if !sample_ok(info, &empty) {
        report.counterexamples.push(empty);
    }
    for _ in 0..samples {
        let args: Vec<Word> = (0..info.arity).map(|_| random_word(&symbols, rng)).collect();
        if !sample_ok(info, &args) && report.counterexamples.len() < 8 {
            report.counterexamples.push(args);
        }
    }
    Ok(report)
}

/// Membership of `args -> result` in the maximal safe signature set at `k`.
pub fn admissible_signature(info: &OperatorInfo, args: &[u32], result: u32, k: u32) -> bool {
    debug_assert_eq!(args.len(), info.arity);
    let (Some(&lo), Some(&hi)) = (args.iter().min(), args.iter().max()) else {
        return true;
    };
    result <= lo && hi <= k && (!info.is_positive() || result < k)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    alphabet: Option<String>,
    #[serde(default, rename = "operator")]
    operators: Vec<OperatorSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorSpec {
    name: String,
    template: String,
    #[serde(default)]
    word: Option<String>,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    arity: Option<usize>,
    category: String,
    #[serde(default)]
    positive_bound: Option<usize>,
    #[serde(default)]
    decrease: Option<DecreaseSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecreaseSpec {
    index: usize,
    #[serde(default)]
    strict: bool,
}

fn template_semantics(spec: &OperatorSpec) -> Result<(usize, Semantics), OpsError> {
    let need_word = || {
        spec.word.clone().map(|w| Word::from(w.as_str())).ok_or_else(|| {
            OpsError::Config(format!("template `{}` of `{}` needs `word`", spec.template, spec.name))
        })
    };
    let out: (usize, Semantics) = match spec.template.as_str() {
        "constant" => {
            let w = need_word()?;
            (0, Arc::new(move |_: &[Word]| w.clone()))
        }
        "prepend" => {
            let w = need_word()?;
            (1, Arc::new(move |a: &[Word]| w.concat(&a[0])))
        }
        "drop_prefix" => {
            let n = spec.n.unwrap_or(1);
            (1, Arc::new(move |a: &[Word]| Word::from_bytes(a[0].as_bytes().get(n..).unwrap_or_default())))
        }
        "length_min" => (
            2,
            Arc::new(|a: &[Word]| if a[0].len() < a[1].len() { a[0].clone() } else { a[1].clone() }),
        ),
        "predicate_equal" => (2, Arc::new(|a: &[Word]| Word::bit(a[0] == a[1]))),
        other => return Err(OpsError::Config(format!("unknown template `{other}`"))),
    };
    if let Some(a) = spec.arity {
        if a != out.0 {
            return Err(OpsError::Config(format!(
                "template `{}` has arity {}, `{}` declares {a}",
                spec.template, out.0, spec.name
            )));
        }
    }
    Ok(out)
}

impl Registry {
    /// Extends the registry from a TOML document with an optional
    /// `alphabet = "..."` key and `[[operator]]` tables.
    pub fn extend_from_toml(&mut self, text: &str) -> Result<(), OpsError> {
        let cfg: ConfigFile = toml::from_str(text).map_err(|e| OpsError::Config(e.to_string()))?;
        if let Some(extra) = cfg.alphabet {
            self.alphabet = Alphabet::with_symbols(extra.bytes().chain(self.alphabet.symbols()));
        }
        for spec in cfg.operators {
            let (arity, semantics) = template_semantics(&spec)?;
            let category = match spec.category.as_str() {
                "neutral" => Category::Neutral,
                "positive" => Category::Positive(spec.positive_bound.unwrap_or(1)),
                other => return Err(OpsError::Config(format!("unknown category `{other}`"))),
            };
            let decrease = match spec.decrease {
                Some(d) if d.index == 0 || d.index > arity => {
                    return Err(OpsError::Config(format!("decrease index {} out of range", d.index)))
                }
                Some(d) => Some(Decrease { index: d.index - 1, strict: d.strict }),
                None => None,
            };
            self.register(OperatorInfo { name: spec.name, arity, category, decrease, semantics })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn builtin_semantics() {
        let r = Registry::builtin();
        let ap = |n: &str, a: &[&str]| r.apply(n, &a.iter().map(|s| Word::from(*s)).collect::<Vec<_>>()).unwrap();
        assert_eq!(ap("pred", &["101"]).to_string(), "01");
        assert_eq!(ap("pred", &[""]).to_string(), "");
        assert_eq!(ap("neq", &["1", "1"]).to_string(), "0");
        assert_eq!(ap("eqw", &["1", "1"]).to_string(), "1");
        assert_eq!(ap("lmin", &["1", "00"]).to_string(), "1");
        assert_eq!(ap("lmin", &["11", "00"]).to_string(), "00");
        assert_eq!(ap("suc1", &["01"]).to_string(), "101");
        assert_eq!(ap("head", &["01"]).to_string(), "0");
        assert!(matches!(r.apply("nope", &[]), Err(OpsError::UnknownOperator(_))));
        assert!(matches!(r.apply("pred", &[]), Err(OpsError::ArityMismatch { .. })));
    }

    #[test]
    fn builtins_pass_sampling() {
        let r = Registry::builtin();
        let mut rng = StdRng::seed_from_u64(7);
        for op in r.iter() {
            let rep = validate_category(op, r.alphabet(), 10_000, &mut rng).unwrap();
            assert!(rep.is_consistent(), "{} {:?}", op.name, rep.counterexamples);
        }
    }

    #[test]
    fn suc1_is_not_neutral() {
        let r = Registry::builtin();
        let mut bad = r.get("suc1").unwrap().clone();
        bad.category = Category::Neutral;
        let rep = validate_category(&bad, r.alphabet(), 100, &mut StdRng::seed_from_u64(1)).unwrap();
        assert!(!rep.is_consistent());
        assert_eq!(validate_category(&bad, r.alphabet(), 0, &mut StdRng::seed_from_u64(1)), Err(OpsError::ZeroSamples));
    }

    #[test]
    fn signatures() {
        let r = Registry::builtin();
        let neq = r.get("neq").unwrap();
        assert!(admissible_signature(neq, &[1, 1], 1, 1));
        assert!(!admissible_signature(neq, &[1, 0], 1, 1));
        let suc = r.get("suc1").unwrap();
        assert!(!admissible_signature(suc, &[1], 1, 1));
        assert!(admissible_signature(suc, &[1], 0, 1));
    }

    #[test]
    fn toml_extension() {
        let mut r = Registry::builtin();
        r.extend_from_toml(
            r#"
            [[operator]]
            name = "tail2"
            template = "drop_prefix"
            n = 2
            category = "neutral"
            decrease = { index = 1, strict = true }

            [[operator]]
            name = "pre01"
            template = "prepend"
            word = "01"
            category = "positive"
            positive_bound = 2
            "#,
        )
        .unwrap();
        assert_eq!(r.apply("tail2", &[Word::from("0110")]).unwrap().to_string(), "10");
        assert_eq!(r.apply("pre01", &[Word::from("1")]).unwrap().to_string(), "011");
        let lying = r#"
            [[operator]]
            name = "grow"
            template = "prepend"
            word = "1"
            category = "neutral"
        "#;
        assert!(matches!(r.extend_from_toml(lying), Err(OpsError::Inconsistent { .. })));
    }
}
