//! Hyperquantities: functions from quantities to extended reals, and the
//! weakest hyper pre transformer.
//!
//! `whp⟦C⟧(ff)(f)` is computed as `ff(sp⟦C⟧(f))`. The syntactic rules for
//! linear hyperquantities live in [`linear`]; the classical transformers
//! recovered at point masses live in [`derived`].

pub mod derived;
pub mod linear;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Evaluator, Expr};
use crate::program::Program;
use crate::quantity::Quantity;
use crate::semantics::{Engine, FixpointStats};
use crate::semiring::{CompensatedSum, Semiring, SemiringKind};
use crate::state::StateSpace;

/// Values below this count as rounding noise rather than negative.
pub const NEGATIVE_TOLERANCE: f64 = 1e-9;

/// A set of states, as a boolean expression or an explicit id list.
#[derive(Debug, Clone, PartialEq)]
pub enum StatePredicate {
    Expr(Expr),
    States(Vec<usize>),
}

impl StatePredicate {
    pub fn mask<S: Semiring>(&self, ev: &Evaluator<'_, S>) -> Result<Vec<bool>> {
        match self {
            StatePredicate::Expr(e) => ev.mask(e),
            StatePredicate::States(ids) => {
                let mut m = vec![false; ev.space.size()];
                for &i in ids {
                    if i >= m.len() {
                        return Err(Error::UnknownVariable(format!("state #{i}")));
                    }
                    m[i] = true;
                }
                Ok(m)
            }
        }
    }

    pub fn negate(&self, space: &StateSpace) -> StatePredicate {
        match self {
            StatePredicate::Expr(e) => StatePredicate::Expr(Expr::not(e.clone())),
            StatePredicate::States(ids) => {
                StatePredicate::States((0..space.size()).filter(|i| !ids.contains(i)).collect())
            }
        }
    }
}

impl From<Expr> for StatePredicate {
    fn from(e: Expr) -> Self {
        StatePredicate::Expr(e)
    }
}

impl fmt::Display for StatePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatePredicate::Expr(e) => write!(f, "{e}"),
            StatePredicate::States(ids) => {
                let ids: Vec<String> = ids.iter().map(|i| format!("#{i}")).collect();
                write!(f, "states{{{}}}", ids.join(", "))
            }
        }
    }
}

/// A set of state sets, tested on the support of a quantity.
#[derive(Debug, Clone, PartialEq)]
pub enum HyperPredicate {
    True,
    /// `ρ ⊆ P`
    Box(StatePredicate),
    /// `P ∩ ρ ≠ ∅`
    Diamond(StatePredicate),
    /// `Q ⊆ ρ`
    Superset(StatePredicate),
    /// `ρ = Q`
    Exactly(StatePredicate),
    CardEq(usize),
    /// All states agree on the given variables.
    Low(Vec<String>),
    /// For all `σ₁, σ₂ ∈ ρ` some `σ ∈ ρ` has the high part of `σ₁` and the
    /// low part of `σ₂`.
    GLow { low: Vec<String>, high: Vec<String> },
    /// `ρ` is one of the listed state sets.
    Members(Vec<Vec<usize>>),
    Not(Box<HyperPredicate>),
    And(Box<HyperPredicate>, Box<HyperPredicate>),
    Or(Box<HyperPredicate>, Box<HyperPredicate>),
}

impl HyperPredicate {
    pub fn low(vars: &[&str]) -> Self {
        HyperPredicate::Low(vars.iter().map(|v| v.to_string()).collect())
    }

    pub fn glow(low: &str, high: &str) -> Self {
        HyperPredicate::GLow { low: vec![low.to_string()], high: vec![high.to_string()] }
    }

    pub fn compile<S: Semiring>(&self, ev: &Evaluator<'_, S>) -> Result<CompiledPredicate> {
        let vars = |vs: &[String]| vs.iter().map(|v| ev.space.require(v)).collect::<Result<Vec<_>>>();
        Ok(match self {
            HyperPredicate::True => CompiledPredicate::True,
            HyperPredicate::Box(p) => CompiledPredicate::Box(p.mask(ev)?),
            HyperPredicate::Diamond(p) => CompiledPredicate::Diamond(p.mask(ev)?),
            HyperPredicate::Superset(p) => CompiledPredicate::Superset(p.mask(ev)?),
            HyperPredicate::Exactly(p) => CompiledPredicate::Exactly(p.mask(ev)?),
            HyperPredicate::CardEq(k) => CompiledPredicate::CardEq(*k),
            HyperPredicate::Low(vs) => CompiledPredicate::Low(vars(vs)?),
            HyperPredicate::GLow { low, high } => CompiledPredicate::GLow(vars(low)?, vars(high)?),
            HyperPredicate::Members(sets) => CompiledPredicate::Members(
                sets.iter()
                    .map(|s| {
                        let mut s = s.clone();
                        s.sort_unstable();
                        s.dedup();
                        s
                    })
                    .collect(),
            ),
            HyperPredicate::Not(p) => CompiledPredicate::Not(Box::new(p.compile(ev)?)),
            HyperPredicate::And(a, b) => CompiledPredicate::And(Box::new(a.compile(ev)?), Box::new(b.compile(ev)?)),
            HyperPredicate::Or(a, b) => CompiledPredicate::Or(Box::new(a.compile(ev)?), Box::new(b.compile(ev)?)),
        })
    }
}

impl fmt::Display for HyperPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HyperPredicate::True => f.write_str("true"),
            HyperPredicate::Box(p) => write!(f, "box({p})"),
            HyperPredicate::Diamond(p) => write!(f, "diamond({p})"),
            HyperPredicate::Superset(p) => write!(f, "superset({p})"),
            HyperPredicate::Exactly(p) => write!(f, "exactly({p})"),
            HyperPredicate::CardEq(k) => write!(f, "card == {k}"),
            HyperPredicate::Low(vs) => write!(f, "low({})", vs.join(", ")),
            HyperPredicate::GLow { low, high } if low.len() == 1 && high.len() == 1 => write!(f, "GNI({}, {})", low[0], high[0]),
            HyperPredicate::GLow { low, high } => write!(f, "GNI({}; {})", low.join(", "), high.join(", ")),
            HyperPredicate::Members(sets) => {
                f.write_str("members{")?;
                for (i, s) in sets.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    let ids: Vec<String> = s.iter().map(|i| format!("#{i}")).collect();
                    write!(f, "{{{}}}", ids.join(", "))?;
                }
                f.write_str("}")
            }
            HyperPredicate::Not(p) => write!(f, "!{p}"),
            HyperPredicate::And(a, b) => write!(f, "({a} && {b})"),
            HyperPredicate::Or(a, b) => write!(f, "({a} || {b})"),
        }
    }
}

/// A hyper predicate with its state predicates tabulated.
#[derive(Debug, Clone, PartialEq)]
pub enum CompiledPredicate {
    True,
    Box(Vec<bool>),
    Diamond(Vec<bool>),
    Superset(Vec<bool>),
    Exactly(Vec<bool>),
    CardEq(usize),
    Low(Vec<usize>),
    GLow(Vec<usize>, Vec<usize>),
    Members(Vec<Vec<usize>>),
    Not(Box<CompiledPredicate>),
    And(Box<CompiledPredicate>, Box<CompiledPredicate>),
    Or(Box<CompiledPredicate>, Box<CompiledPredicate>),
}

impl CompiledPredicate {
    /// Whether the state set `support` (ascending ids) belongs to the predicate.
    pub fn holds(&self, space: &StateSpace, support: &[usize]) -> bool {
        let inside = |m: &Vec<bool>| support.iter().all(|&i| m[i]);
        match self {
            CompiledPredicate::True => true,
            CompiledPredicate::Box(m) => inside(m),
            CompiledPredicate::Diamond(m) => support.iter().any(|&i| m[i]),
            CompiledPredicate::Superset(m) => m.iter().enumerate().filter(|(_, &b)| b).all(|(i, _)| support.binary_search(&i).is_ok()),
            CompiledPredicate::Exactly(m) => inside(m) && m.iter().filter(|&&b| b).count() == support.len(),
            CompiledPredicate::CardEq(k) => support.len() == *k,
            CompiledPredicate::Low(vars) => {
                let key = |id: usize| vars.iter().map(|&v| space.value(id, v)).collect::<Vec<_>>();
                support.windows(2).all(|w| key(w[0]) == key(w[1]))
            }
            CompiledPredicate::GLow(low, high) => {
                let part = |id: usize, vs: &[usize]| vs.iter().map(|&v| space.value(id, v)).collect::<Vec<_>>();
                let pairs: BTreeSet<_> = support.iter().map(|&i| (part(i, high), part(i, low))).collect();
                let highs: BTreeSet<_> = pairs.iter().map(|(h, _)| h.clone()).collect();
                let lows: BTreeSet<_> = pairs.iter().map(|(_, l)| l.clone()).collect();
                pairs.len() == highs.len() * lows.len()
            }
            CompiledPredicate::Members(sets) => sets.iter().any(|s| s == support),
            CompiledPredicate::Not(p) => !p.holds(space, support),
            CompiledPredicate::And(a, b) => a.holds(space, support) && b.holds(space, support),
            CompiledPredicate::Or(a, b) => a.holds(space, support) || b.holds(space, support),
        }
    }
}

/// Hyperquantity expression trees.
#[derive(Debug, Clone, PartialEq)]
pub enum Hyperquantity {
    Const(f64),
    /// `𝔼[e](μ) = Σ_σ μ(σ) · e(σ)`
    Expect(Expr),
    Var(Expr),
    Cov(Expr, Expr),
    /// `⋎[e](μ)`: largest `e(σ)` over the support, `−∞` when empty.
    SupSupport(Expr),
    /// `⋏[e](μ)`: smallest `e(σ)` over the support, `+∞` when empty.
    InfSupport(Expr),
    /// `⋎[e]⇑`: as `⋎[e]` but `+∞` on an empty support.
    SupSupportGuarded(Expr),
    /// `⋏[e]⇓`: as `⋏[e]` but `−∞` on an empty support.
    InfSupportGuarded(Expr),
    /// `⋎_τ ([P] ⊙ μ)(τ)`: largest quantity value inside `P`.
    SupValue(StatePredicate),
    /// Hyper Iverson bracket: `+∞` if the support is in the predicate, else 0.
    Iverson(HyperPredicate),
    Add(Box<Hyperquantity>, Box<Hyperquantity>),
    Mul(Box<Hyperquantity>, Box<Hyperquantity>),
    ScalarMul(f64, Box<Hyperquantity>),
    /// `k − ff`
    KMinus(f64, Box<Hyperquantity>),
    /// Signed difference; only meaningful inside a nonnegative whole.
    Sub(Box<Hyperquantity>, Box<Hyperquantity>),
    Min(Box<Hyperquantity>, Box<Hyperquantity>),
    Max(Box<Hyperquantity>, Box<Hyperquantity>),
    /// `inner([P] ⊙ μ)`
    Observe(StatePredicate, Box<Hyperquantity>),
}

impl Hyperquantity {
    pub fn expect(e: Expr) -> Self {
        Hyperquantity::Expect(e)
    }

    pub fn add(self, o: Hyperquantity) -> Self {
        Hyperquantity::Add(Box::new(self), Box::new(o))
    }

    pub fn mul(self, o: Hyperquantity) -> Self {
        Hyperquantity::Mul(Box::new(self), Box::new(o))
    }

    pub fn sub(self, o: Hyperquantity) -> Self {
        Hyperquantity::Sub(Box::new(self), Box::new(o))
    }

    pub fn scale(self, r: f64) -> Self {
        Hyperquantity::ScalarMul(r, Box::new(self))
    }

    pub fn k_minus(self, k: f64) -> Self {
        Hyperquantity::KMinus(k, Box::new(self))
    }

    pub fn min(self, o: Hyperquantity) -> Self {
        Hyperquantity::Min(Box::new(self), Box::new(o))
    }

    pub fn max(self, o: Hyperquantity) -> Self {
        Hyperquantity::Max(Box::new(self), Box::new(o))
    }

    pub fn observe(self, p: impl Into<StatePredicate>) -> Self {
        Hyperquantity::Observe(p.into(), Box::new(self))
    }

    /// Whether the syntactic rules of [`linear`] apply.
    pub fn is_linear(&self) -> bool {
        use Hyperquantity::*;
        match self {
            Const(_) | Expect(_) | Var(_) | Cov(..) | SupSupport(_) | InfSupport(_) => true,
            SupSupportGuarded(_) | InfSupportGuarded(_) | SupValue(_) | Iverson(_) => false,
            Add(a, b) | Mul(a, b) | Sub(a, b) | Min(a, b) | Max(a, b) => a.is_linear() && b.is_linear(),
            ScalarMul(_, a) | KMinus(_, a) | Observe(_, a) => a.is_linear(),
        }
    }
}

impl fmt::Display for Hyperquantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Hyperquantity::*;
        match self {
            Const(k) => f.write_str(&crate::semiring::render_real(*k)),
            Expect(e) => write!(f, "E[{e}]"),
            Var(e) => write!(f, "Var[{e}]"),
            Cov(a, b) => write!(f, "Cov[{a}, {b}]"),
            SupSupport(e) => write!(f, "sup[{e}]"),
            InfSupport(e) => write!(f, "inf[{e}]"),
            SupSupportGuarded(e) => write!(f, "sup_up[{e}]"),
            InfSupportGuarded(e) => write!(f, "inf_down[{e}]"),
            SupValue(p) => write!(f, "maxval[{p}]"),
            Iverson(p) => write!(f, "[{p}]"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            ScalarMul(r, a) => write!(f, "({} * {a})", crate::semiring::render_real(*r)),
            KMinus(k, a) => write!(f, "({} k- {a})", crate::semiring::render_real(*k)),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Min(a, b) => write!(f, "min({a}, {b})"),
            Max(a, b) => write!(f, "max({a}, {b})"),
            Observe(p, a) => write!(f, "observe({p}, {a})"),
        }
    }
}

fn undefined(what: &str) -> Error {
    Error::NotRepresentable(crate::semiring::NotRepresentable { semiring: "hyper".into(), value: what.into() })
}

fn plus(a: f64, b: f64) -> Result<f64> {
    let s = a + b;
    if s.is_nan() {
        return Err(undefined("inf + -inf"));
    }
    Ok(s)
}

// ∞ · 0 = 0
fn times(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

impl<S: Semiring> Engine<S> {
    /// Evaluates `ff` at `f`, nonnegative as the codomain demands.
    pub fn eval_hyper(&self, ff: &Hyperquantity, f: &Quantity<S::Value>) -> Result<f64> {
        let v = self.eval_signed(ff, f)?;
        if v < -NEGATIVE_TOLERANCE {
            return Err(Error::NegativeHyperValue { value: v });
        }
        Ok(v.max(0.0))
    }

    /// Evaluates `ff` at `f` in signed arithmetic.
    pub fn eval_signed(&self, ff: &Hyperquantity, f: &Quantity<S::Value>) -> Result<f64> {
        use Hyperquantity::*;
        let ev = self.evaluator();
        let space = &self.space;
        let s = &self.semiring;
        Ok(match ff {
            Const(k) => *k,
            Expect(e) => self.expectation(e, f)?,
            Var(e) => {
                let m = self.expectation(e, f)?;
                plus(self.expectation(&e.clone().mul(e.clone()), f)?, -times(m, m))?
            }
            Cov(a, b) => {
                let ab = self.expectation(&a.clone().mul(b.clone()), f)?;
                plus(ab, -times(self.expectation(a, f)?, self.expectation(b, f)?))?
            }
            SupSupport(e) | SupSupportGuarded(e) => {
                let (v, empty) = self.over_support(e, f, f64::NEG_INFINITY, f64::max)?;
                if empty && matches!(ff, SupSupportGuarded(_)) {
                    f64::INFINITY
                } else {
                    v
                }
            }
            InfSupport(e) | InfSupportGuarded(e) => {
                let (v, empty) = self.over_support(e, f, f64::INFINITY, f64::min)?;
                if empty && matches!(ff, InfSupportGuarded(_)) {
                    f64::NEG_INFINITY
                } else {
                    v
                }
            }
            SupValue(p) => {
                let mask = p.mask(&ev)?;
                let mut best = f64::NEG_INFINITY;
                for (id, v) in f.values.iter().enumerate() {
                    let w = s.mul(&s.iverson(mask[id]), v);
                    let r = s.to_real(&w).ok_or_else(|| Error::SemiringNotNumeric {
                        semiring: s.name(),
                        what: ff.to_string(),
                    })?;
                    best = best.max(r);
                }
                best
            }
            Iverson(hp) => {
                let c = hp.compile(&ev)?;
                if c.holds(space, &f.support(s)) {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            Add(a, b) => plus(self.eval_signed(a, f)?, self.eval_signed(b, f)?)?,
            Mul(a, b) => times(self.eval_signed(a, f)?, self.eval_signed(b, f)?),
            ScalarMul(r, a) => times(*r, self.eval_signed(a, f)?),
            KMinus(k, a) => plus(*k, -self.eval_signed(a, f)?)?,
            Sub(a, b) => plus(self.eval_signed(a, f)?, -self.eval_signed(b, f)?)?,
            Min(a, b) => self.eval_signed(a, f)?.min(self.eval_signed(b, f)?),
            Max(a, b) => self.eval_signed(a, f)?.max(self.eval_signed(b, f)?),
            Observe(p, a) => {
                let filter = Quantity::indicator(s, &p.mask(&ev)?);
                self.eval_signed(a, &filter.mul(s, f))?
            }
        })
    }

    fn expectation(&self, e: &Expr, f: &Quantity<S::Value>) -> Result<f64> {
        let s = &self.semiring;
        if !matches!(s.kind(), SemiringKind::Prob | SemiringKind::Bool) {
            return Err(Error::SemiringMismatch {
                what: format!("E[{e}]"),
                expected: "prob or bool".into(),
                found: s.name(),
            });
        }
        let ev = self.evaluator();
        let mut env = vec![0; self.space.vars().len()];
        let mut sum = CompensatedSum::default();
        for (id, v) in f.values.iter().enumerate() {
            if s.is_zero(v) {
                continue;
            }
            let w = s.to_real(v).expect("prob and bool are numeric");
            self.space.decode_into(id, &mut env);
            sum.add(times(w, ev.eval_real(e, &env)?));
        }
        Ok(sum.value())
    }

    fn over_support(&self, e: &Expr, f: &Quantity<S::Value>, init: f64, pick: fn(f64, f64) -> f64) -> Result<(f64, bool)> {
        let ev = self.evaluator();
        let mut env = vec![0; self.space.vars().len()];
        let mut acc = init;
        let mut empty = true;
        for (id, v) in f.values.iter().enumerate() {
            if self.semiring.is_zero(v) {
                continue;
            }
            empty = false;
            self.space.decode_into(id, &mut env);
            acc = pick(acc, ev.eval_real(e, &env)?);
        }
        Ok((acc, empty))
    }

    /// `whp⟦C⟧(ff)`, evaluable at any quantity.
    pub fn whp<'a>(&'a self, p: &'a Program, ff: &'a Hyperquantity) -> Whp<'a, S> {
        Whp { engine: self, program: p, post: ff }
    }
}

/// `λf. ff(sp⟦C⟧(f))`.
#[derive(Debug, Clone, Copy)]
pub struct Whp<'a, S: Semiring> {
    engine: &'a Engine<S>,
    program: &'a Program,
    post: &'a Hyperquantity,
}

impl<S: Semiring> Whp<'_, S> {
    pub fn eval(&self, f: &Quantity<S::Value>) -> Result<f64> {
        self.engine.eval_hyper(self.post, &self.engine.sp(self.program, f)?)
    }

    pub fn eval_signed(&self, f: &Quantity<S::Value>) -> Result<f64> {
        self.engine.eval_signed(self.post, &self.engine.sp(self.program, f)?)
    }

    /// Signed value together with the fixpoint statistics of the sp run.
    pub fn eval_stats(&self, f: &Quantity<S::Value>) -> Result<(f64, FixpointStats)> {
        let (q, stats) = self.engine.sp_stats(self.program, f)?;
        Ok((self.engine.eval_signed(self.post, &q)?, stats))
    }
}
