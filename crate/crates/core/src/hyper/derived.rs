//! Classical transformers recovered from `whp` at point masses.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::program::Program;
use crate::quantity::Quantity;
use crate::semantics::Engine;
use crate::semiring::{Semiring, SemiringKind};

use super::Hyperquantity;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derived {
    /// `whp⟦C⟧(𝔼[f])(ι_σ)`, the expected value of `f`.
    WpExpect,
    /// `whp⟦C⟧(𝔼[f] + 1 − 𝔼[1])(ι_σ)`.
    WlpExpect,
    /// `whp⟦C⟧(⋎[f])(ι_σ)`
    WpSup,
    /// `whp⟦C⟧(⋏[f])(ι_σ)`
    WlpInf,
    /// `whp⟦C⟧(⋏[f]⇓)(ι_σ)`
    WpInf,
    /// `whp⟦C⟧(⋎[f]⇑)(ι_σ)`
    WlpSup,
}

impl Derived {
    pub fn name(self) -> &'static str {
        match self {
            Derived::WpExpect => "wp_expect",
            Derived::WlpExpect => "wlp_expect",
            Derived::WpSup => "wp_sup",
            Derived::WlpInf => "wlp_inf",
            Derived::WpInf => "wp_inf",
            Derived::WlpSup => "wlp_sup",
        }
    }

    fn required(self) -> SemiringKind {
        match self {
            Derived::WpExpect | Derived::WlpExpect => SemiringKind::Prob,
            _ => SemiringKind::MaxMin,
        }
    }

    pub fn post(self, f: &Expr) -> Hyperquantity {
        use Hyperquantity::*;
        match self {
            Derived::WpExpect => Expect(f.clone()),
            Derived::WlpExpect => Expect(f.clone()).add(Const(1.0)).sub(Expect(Expr::int(1))),
            Derived::WpSup => SupSupport(f.clone()),
            Derived::WlpInf => InfSupport(f.clone()),
            Derived::WpInf => InfSupportGuarded(f.clone()),
            Derived::WlpSup => SupSupportGuarded(f.clone()),
        }
    }
}

impl<S: Semiring> Engine<S> {
    /// The derived transformer at every point mass, in state id order.
    pub fn derived(&self, which: Derived, p: &Program, f: &Expr) -> Result<Vec<f64>> {
        if self.semiring.kind() != which.required() {
            return Err(Error::SemiringMismatch {
                what: which.name().into(),
                expected: which.required().to_string(),
                found: self.semiring.name(),
            });
        }
        let post = which.post(f);
        let w = self.whp(p, &post);
        (0..self.space.size()).map(|id| w.eval_signed(&Quantity::point(&self.semiring, &self.space, id))).collect()
    }
}
