use super::{AdditionUndefined, CompensatedSum, NotRepresentable, Semiring, SemiringKind};

pub const DEFAULT_PROB_TOLERANCE: f64 = 1e-9;

/// `⟨[0,1], +, ·, 0, 1⟩`, partial: `a + b` is undefined above 1.
///
/// Sums that exceed 1 by at most `tolerance` are clamped to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prob {
    pub tolerance: f64,
}

impl Default for Prob {
    fn default() -> Self {
        Prob { tolerance: DEFAULT_PROB_TOLERANCE }
    }
}

impl Prob {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Prob { tolerance }
    }

    fn undefined(&self, a: f64, b: f64) -> AdditionUndefined {
        AdditionUndefined { semiring: self.name(), left: a.to_string(), right: b.to_string() }
    }
}

impl Semiring for Prob {
    type Value = f64;

    fn kind(&self) -> SemiringKind {
        SemiringKind::Prob
    }

    fn zero(&self) -> f64 {
        0.0
    }

    fn one(&self) -> f64 {
        1.0
    }

    fn top(&self) -> Option<f64> {
        Some(1.0)
    }

    fn is_partial(&self) -> bool {
        true
    }

    fn is_idempotent(&self) -> bool {
        false
    }

    fn add(&self, a: &f64, b: &f64) -> Result<f64, AdditionUndefined> {
        let s = a + b;
        if s > 1.0 + self.tolerance {
            return Err(self.undefined(*a, *b));
        }
        Ok(s.min(1.0))
    }

    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }

    fn leq(&self, a: &f64, b: &f64) -> bool {
        *a <= *b + self.tolerance
    }

    fn approx_eq(&self, a: &f64, b: &f64, tolerance: f64) -> bool {
        (a - b).abs() <= tolerance
    }

    fn is_zero(&self, a: &f64) -> bool {
        *a == 0.0
    }

    fn big_add<I>(&self, xs: I) -> Result<f64, AdditionUndefined>
    where
        I: IntoIterator<Item = f64>,
    {
        let mut sum = CompensatedSum::default();
        for x in xs {
            let before = sum.value();
            sum.add(x);
            if sum.value() > 1.0 + self.tolerance {
                return Err(self.undefined(before, x));
            }
        }
        Ok(sum.value().min(1.0))
    }

    fn from_real(&self, r: f64) -> Result<f64, NotRepresentable> {
        if (-self.tolerance..=1.0 + self.tolerance).contains(&r) {
            Ok(r.clamp(0.0, 1.0))
        } else {
            Err(NotRepresentable { semiring: self.name(), value: r.to_string() })
        }
    }

    fn to_real(&self, a: &f64) -> Option<f64> {
        Some(*a)
    }

    fn distance(&self, a: &f64, b: &f64) -> f64 {
        (a - b).abs()
    }

    fn render(&self, a: &f64) -> String {
        a.to_string()
    }
}
