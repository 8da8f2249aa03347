use std::collections::BTreeSet;
use std::fmt;

use super::{AdditionUndefined, NotRepresentable, Semiring, SemiringKind};

pub const ALPHABET: [char; 2] = ['a', 'b'];
pub const DEFAULT_MAX_WORD_LEN: usize = 8;

/// Finite languages over `{a, b}` with union and concatenation, cut off at
/// words of length `max_len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lang {
    pub max_len: usize,
}

impl Default for Lang {
    fn default() -> Self {
        Lang { max_len: DEFAULT_MAX_WORD_LEN }
    }
}

impl Lang {
    pub fn new(max_len: usize) -> Self {
        Lang { max_len }
    }

    pub fn words<'a>(&self, ws: impl IntoIterator<Item = &'a str>) -> LangValue {
        LangValue::new(ws.into_iter().map(str::to_string).collect())
    }
}

/// A set of words. `truncated` records that a concatenation dropped words
/// longer than the cutoff somewhere upstream; it does not take part in
/// equality.
#[derive(Debug, Clone, Default)]
pub struct LangValue {
    pub words: BTreeSet<String>,
    pub truncated: bool,
}

impl LangValue {
    pub fn new(words: BTreeSet<String>) -> Self {
        LangValue { words, truncated: false }
    }
}

impl PartialEq for LangValue {
    fn eq(&self, other: &Self) -> bool {
        self.words == other.words
    }
}

impl fmt::Display for LangValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, w) in self.words.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(if w.is_empty() { "eps" } else { w })?;
        }
        f.write_str("}")?;
        if self.truncated {
            f.write_str("+")?;
        }
        Ok(())
    }
}

impl Semiring for Lang {
    type Value = LangValue;

    fn kind(&self) -> SemiringKind {
        SemiringKind::Lang
    }

    fn name(&self) -> String {
        format!("lang({})", self.max_len)
    }

    fn zero(&self) -> LangValue {
        LangValue::default()
    }

    fn one(&self) -> LangValue {
        LangValue::new(BTreeSet::from([String::new()]))
    }

    fn is_idempotent(&self) -> bool {
        true
    }

    fn add(&self, a: &LangValue, b: &LangValue) -> Result<LangValue, AdditionUndefined> {
        let mut words = a.words.clone();
        words.extend(b.words.iter().cloned());
        Ok(LangValue { words, truncated: a.truncated || b.truncated })
    }

    // not commutative
    fn mul(&self, a: &LangValue, b: &LangValue) -> LangValue {
        let mut words = BTreeSet::new();
        let mut truncated = a.truncated || b.truncated;
        for u in &a.words {
            for v in &b.words {
                if u.len() + v.len() <= self.max_len {
                    words.insert(format!("{u}{v}"));
                } else {
                    truncated = true;
                }
            }
        }
        LangValue { words, truncated }
    }

    fn leq(&self, a: &LangValue, b: &LangValue) -> bool {
        a.words.is_subset(&b.words)
    }

    fn is_zero(&self, a: &LangValue) -> bool {
        a.words.is_empty()
    }

    fn from_real(&self, r: f64) -> Result<LangValue, NotRepresentable> {
        if r == 0.0 {
            Ok(self.zero())
        } else if r == 1.0 {
            Ok(self.one())
        } else {
            Err(NotRepresentable { semiring: self.name(), value: r.to_string() })
        }
    }

    fn to_real(&self, _a: &LangValue) -> Option<f64> {
        None
    }

    fn from_words(&self, words: &[String]) -> Result<LangValue, NotRepresentable> {
        let mut set = BTreeSet::new();
        for w in words {
            let w = if w == "eps" { "" } else { w.as_str() };
            if !w.chars().all(|c| ALPHABET.contains(&c)) || w.len() > self.max_len {
                return Err(NotRepresentable { semiring: self.name(), value: w.to_string() });
            }
            set.insert(w.to_string());
        }
        Ok(LangValue::new(set))
    }

    fn is_truncated(&self, a: &LangValue) -> bool {
        a.truncated
    }

    fn render(&self, a: &LangValue) -> String {
        a.to_string()
    }
}
