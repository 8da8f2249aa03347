//! Weight domains.
//!
//! Every analysis in the crate is generic over [`Semiring`]. The five shipped
//! instances are [`Boolean`], [`Prob`], [`Tropical`], [`MaxMin`] and [`Lang`].

mod boolean;
mod lang;
mod maxmin;
mod prob;
mod tropical;

use std::fmt;

pub use boolean::Boolean;
pub use lang::{Lang, LangValue, ALPHABET, DEFAULT_MAX_WORD_LEN};
pub use maxmin::MaxMin;
pub use prob::{Prob, DEFAULT_PROB_TOLERANCE};
pub use tropical::Tropical;

/// The sum of two values left the carrier of a partial semiring.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("addition undefined in {semiring}: {left} + {right}")]
pub struct AdditionUndefined {
    pub semiring: String,
    pub left: String,
    pub right: String,
}

/// A number or literal that has no counterpart in the semiring's carrier.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{value} is not a value of {semiring}")]
pub struct NotRepresentable {
    pub semiring: String,
    pub value: String,
}

/// Tag for the shipped instances, used where an analysis only makes sense
/// for particular weight domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SemiringKind {
    Bool,
    Prob,
    Tropical,
    MaxMin,
    Lang,
}

impl fmt::Display for SemiringKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SemiringKind::Bool => "bool",
            SemiringKind::Prob => "prob",
            SemiringKind::Tropical => "tropical",
            SemiringKind::MaxMin => "maxmin",
            SemiringKind::Lang => "lang",
        })
    }
}

/// A naturally ordered semiring `⟨U, ⊕, ⊙, 0, 1⟩`, possibly partial in `⊕`.
pub trait Semiring: Clone + fmt::Debug + Send + Sync {
    type Value: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn kind(&self) -> SemiringKind;

    fn name(&self) -> String {
        self.kind().to_string()
    }

    fn zero(&self) -> Self::Value;
    fn one(&self) -> Self::Value;

    /// Greatest element of the natural order, when the instance has one.
    fn top(&self) -> Option<Self::Value> {
        None
    }

    fn is_partial(&self) -> bool {
        false
    }

    /// `u ⊕ u = u` for every `u`; selects exact-equality fixpoint detection.
    fn is_idempotent(&self) -> bool;

    fn add(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, AdditionUndefined>;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;

    /// Natural order: `a ≤ b` iff `a ⊕ w = b` for some `w`.
    fn leq(&self, a: &Self::Value, b: &Self::Value) -> bool;

    fn approx_eq(&self, a: &Self::Value, b: &Self::Value, _tolerance: f64) -> bool {
        a == b
    }

    fn is_zero(&self, a: &Self::Value) -> bool {
        *a == self.zero()
    }

    /// Left-to-right fold of `add`.
    fn big_add<I>(&self, xs: I) -> Result<Self::Value, AdditionUndefined>
    where
        I: IntoIterator<Item = Self::Value>,
    {
        let mut acc = self.zero();
        for x in xs {
            acc = self.add(&acc, &x)?;
        }
        Ok(acc)
    }

    /// Embeds a real number, e.g. the literal `0.5` in `weight(0.5)`.
    fn from_real(&self, r: f64) -> Result<Self::Value, NotRepresentable>;

    /// The real number a value denotes, if the carrier is numeric.
    fn to_real(&self, a: &Self::Value) -> Option<f64>;

    fn from_words(&self, words: &[String]) -> Result<Self::Value, NotRepresentable> {
        Err(NotRepresentable {
            semiring: self.name(),
            value: format!("lang{{{}}}", words.join(", ")),
        })
    }

    /// Distance used by the fixpoint loop on non-idempotent instances.
    fn distance(&self, a: &Self::Value, b: &Self::Value) -> f64 {
        if a == b {
            0.0
        } else {
            f64::INFINITY
        }
    }

    /// Whether the value lost information to a finite cutoff.
    fn is_truncated(&self, _a: &Self::Value) -> bool {
        false
    }

    fn render(&self, a: &Self::Value) -> String;

    fn iverson(&self, b: bool) -> Self::Value {
        if b {
            self.one()
        } else {
            self.zero()
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        let v = self.sum + self.comp;
        if v.is_nan() {
            // ∞ - ∞ in the compensation term; the raw sum is the right answer.
            self.sum
        } else {
            v
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<T: IntoIterator<Item = f64>>(iter: T) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn render_real(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}
