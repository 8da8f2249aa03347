use super::{render_real, AdditionUndefined, NotRepresentable, Semiring, SemiringKind};

/// `⟨ℝ±∞, max, min, −∞, +∞⟩`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MaxMin;

impl Semiring for MaxMin {
    type Value = f64;

    fn kind(&self) -> SemiringKind {
        SemiringKind::MaxMin
    }

    fn zero(&self) -> f64 {
        f64::NEG_INFINITY
    }

    fn one(&self) -> f64 {
        f64::INFINITY
    }

    fn top(&self) -> Option<f64> {
        Some(f64::INFINITY)
    }

    fn is_idempotent(&self) -> bool {
        true
    }

    fn add(&self, a: &f64, b: &f64) -> Result<f64, AdditionUndefined> {
        Ok(a.max(*b))
    }

    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a.min(*b)
    }

    fn leq(&self, a: &f64, b: &f64) -> bool {
        a <= b
    }

    fn from_real(&self, r: f64) -> Result<f64, NotRepresentable> {
        if r.is_nan() {
            Err(NotRepresentable { semiring: self.name(), value: "NaN".into() })
        } else {
            Ok(r + 0.0)
        }
    }

    fn to_real(&self, a: &f64) -> Option<f64> {
        Some(*a)
    }

    fn render(&self, a: &f64) -> String {
        render_real(*a)
    }
}
