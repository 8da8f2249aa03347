use super::{AdditionUndefined, NotRepresentable, Semiring, SemiringKind};

/// `⟨{0,1}, ∨, ∧, 0, 1⟩`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Boolean;

impl Semiring for Boolean {
    type Value = bool;

    fn kind(&self) -> SemiringKind {
        SemiringKind::Bool
    }

    fn zero(&self) -> bool {
        false
    }

    fn one(&self) -> bool {
        true
    }

    fn top(&self) -> Option<bool> {
        Some(true)
    }

    fn is_idempotent(&self) -> bool {
        true
    }

    fn add(&self, a: &bool, b: &bool) -> Result<bool, AdditionUndefined> {
        Ok(*a || *b)
    }

    fn mul(&self, a: &bool, b: &bool) -> bool {
        *a && *b
    }

    fn leq(&self, a: &bool, b: &bool) -> bool {
        !*a || *b
    }

    fn from_real(&self, r: f64) -> Result<bool, NotRepresentable> {
        if r == 0.0 {
            Ok(false)
        } else if r == 1.0 {
            Ok(true)
        } else {
            Err(NotRepresentable { semiring: self.name(), value: r.to_string() })
        }
    }

    fn to_real(&self, a: &bool) -> Option<f64> {
        Some(if *a { 1.0 } else { 0.0 })
    }

    fn render(&self, a: &bool) -> String {
        if *a { "1" } else { "0" }.to_string()
    }
}
