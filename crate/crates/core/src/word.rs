//! Words over a finite alphabet and the restriction operator.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

/// A finite word. Symbols are single ASCII bytes.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn from_bytes(bytes: impl Into<Vec<u8>>) -> Word {
        Word(bytes.into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }

    pub fn first(&self) -> Option<u8> {
        self.0.first().copied()
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn is_subword_of(&self, other: &Word) -> bool {
        self.0.is_empty() || other.0.windows(self.0.len()).any(|w| w == self.0.as_slice())
    }

    /// `"1"` or `"0"`.
    pub fn bit(b: bool) -> Word {
        Word(vec![if b { b'1' } else { b'0' }])
    }

    /// The unary word `1^n`.
    pub fn unary(n: usize) -> Word {
        Word(vec![b'1'; n])
    }

    /// Every word over `symbols` of length at most `max_len`, shortest first.
    pub fn all_up_to(symbols: &[u8], max_len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(layer.len() * symbols.len());
            for w in &layer {
                for &s in symbols {
                    let mut v = w.0.clone();
                    v.push(s);
                    next.push(Word(v));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

impl From<&str> for Word {
    fn from(s: &str) -> Word {
        Word(s.as_bytes().to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.0))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", String::from_utf8_lossy(&self.0))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `v ↾ u`: the first `min(|u|, |v|)` symbols of `v`, then `1`, then `0`s,
/// for a total length of `|u| + 1`.
pub fn restrict(v: &Word, u: &Word) -> Word {
    let keep = u.len().min(v.len());
    let mut out = Vec::with_capacity(u.len() + 1);
    out.extend_from_slice(&v.0[..keep]);
    out.push(b'1');
    out.resize(u.len() + 1, b'0');
    Word(out)
}

/// A finite alphabet, always containing `0` and `1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: BTreeSet<u8>,
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::binary()
    }
}

impl Alphabet {
    pub fn binary() -> Alphabet {
        Alphabet { symbols: b"01".iter().copied().collect() }
    }

    pub fn with_symbols(extra: impl IntoIterator<Item = u8>) -> Alphabet {
        let mut a = Alphabet::binary();
        a.symbols.extend(extra);
        a
    }

    pub fn contains(&self, s: u8) -> bool {
        self.symbols.contains(&s)
    }

    pub fn admits(&self, w: &Word) -> bool {
        w.as_bytes().iter().all(|s| self.contains(*s))
    }

    pub fn symbols(&self) -> Vec<u8> {
        self.symbols.iter().copied().collect()
    }
}
