use super::{render_real, AdditionUndefined, NotRepresentable, Semiring, SemiringKind};

/// `⟨[0,+∞], min, +, +∞, 0⟩`. `f64::INFINITY` is the zero; `+` saturates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tropical;

impl Semiring for Tropical {
    type Value = f64;

    fn kind(&self) -> SemiringKind {
        SemiringKind::Tropical
    }

    fn zero(&self) -> f64 {
        f64::INFINITY
    }

    fn one(&self) -> f64 {
        0.0
    }

    fn top(&self) -> Option<f64> {
        Some(0.0)
    }

    fn is_idempotent(&self) -> bool {
        true
    }

    fn add(&self, a: &f64, b: &f64) -> Result<f64, AdditionUndefined> {
        Ok(a.min(*b))
    }

    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }

    // min is the addition, so the order is reversed
    fn leq(&self, a: &f64, b: &f64) -> bool {
        a >= b
    }

    fn from_real(&self, r: f64) -> Result<f64, NotRepresentable> {
        if r >= 0.0 {
            Ok(r + 0.0)
        } else {
            Err(NotRepresentable { semiring: self.name(), value: r.to_string() })
        }
    }

    fn to_real(&self, a: &f64) -> Option<f64> {
        Some(*a)
    }

    fn render(&self, a: &f64) -> String {
        render_real(*a)
    }
}
