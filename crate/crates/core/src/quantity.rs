//! Quantities: functions from states to semiring values, stored densely by
//! state id.

use std::ops::{Index, IndexMut};

use crate::error::Result;
use crate::expr::{Evaluator, Expr};
use crate::semiring::Semiring;
use crate::state::StateSpace;

#[derive(Debug, Clone, PartialEq)]
pub struct Quantity<V> {
    pub values: Vec<V>,
}

impl<V: Clone> Quantity<V> {
    pub fn new(values: Vec<V>) -> Self {
        Quantity { values }
    }

    pub fn constant(space: &StateSpace, v: V) -> Self {
        Quantity { values: vec![v; space.size()] }
    }

    pub fn zero<S: Semiring<Value = V>>(s: &S, space: &StateSpace) -> Self {
        Quantity { values: vec![s.zero(); space.size()] }
    }

    pub fn one<S: Semiring<Value = V>>(s: &S, space: &StateSpace) -> Self {
        Quantity { values: vec![s.one(); space.size()] }
    }

    /// `ι_σ`: one at `id`, zero elsewhere.
    pub fn point<S: Semiring<Value = V>>(s: &S, space: &StateSpace, id: usize) -> Self {
        let mut q = Self::zero(s, space);
        q.values[id] = s.one();
        q
    }

    /// Iverson bracket of a predicate mask.
    pub fn indicator<S: Semiring<Value = V>>(s: &S, mask: &[bool]) -> Self {
        Quantity { values: mask.iter().map(|&b| s.iverson(b)).collect() }
    }

    /// Tabulates a weight expression.
    pub fn from_expr<S: Semiring<Value = V>>(s: &S, space: &StateSpace, e: &Expr) -> Result<Self> {
        Ok(Quantity { values: Evaluator::new(s, space).weights(e)? })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `supp(f)`, by exact comparison with the semiring's zero.
    pub fn support<S: Semiring<Value = V>>(&self, s: &S) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| !s.is_zero(&self.values[i])).collect()
    }

    pub fn support_mask<S: Semiring<Value = V>>(&self, s: &S) -> Vec<bool> {
        self.values.iter().map(|v| !s.is_zero(v)).collect()
    }

    /// `f ⊕ g`, pointwise.
    pub fn add<S: Semiring<Value = V>>(&self, s: &S, o: &Self) -> Result<Self> {
        let values = self.values.iter().zip(&o.values).map(|(a, b)| s.add(a, b)).collect::<Result<_, _>>()?;
        Ok(Quantity { values })
    }

    /// `f ⊙ g`, pointwise with `f` on the left.
    pub fn mul<S: Semiring<Value = V>>(&self, s: &S, o: &Self) -> Self {
        Quantity { values: self.values.iter().zip(&o.values).map(|(a, b)| s.mul(a, b)).collect() }
    }

    /// `⊕_σ f(σ) ⊙ g(σ)` in id order.
    pub fn dot<S: Semiring<Value = V>>(&self, s: &S, o: &Self) -> Result<V> {
        Ok(s.big_add(self.values.iter().zip(&o.values).map(|(a, b)| s.mul(a, b)))?)
    }

    /// `⊕_σ f(σ)`.
    pub fn total<S: Semiring<Value = V>>(&self, s: &S) -> Result<V> {
        Ok(s.big_add(self.values.iter().cloned())?)
    }

    pub fn approx_eq<S: Semiring<Value = V>>(&self, s: &S, o: &Self, tol: f64) -> bool {
        self.len() == o.len() && self.values.iter().zip(&o.values).all(|(a, b)| s.approx_eq(a, b, tol))
    }

    /// Largest pointwise distance.
    pub fn distance<S: Semiring<Value = V>>(&self, s: &S, o: &Self) -> f64 {
        self.values.iter().zip(&o.values).map(|(a, b)| s.distance(a, b)).fold(0.0, f64::max)
    }

    pub fn render<S: Semiring<Value = V>>(&self, s: &S, space: &StateSpace) -> String {
        let parts: Vec<String> = self
            .support(s)
            .into_iter()
            .map(|i| format!("{} -> {}", space.show(i), s.render(&self.values[i])))
            .collect();
        if parts.is_empty() {
            "zero".into()
        } else {
            parts.join("\n")
        }
    }
}

impl<V> Index<usize> for Quantity<V> {
    type Output = V;
    fn index(&self, i: usize) -> &V {
        &self.values[i]
    }
}

impl<V> IndexMut<usize> for Quantity<V> {
    fn index_mut(&mut self, i: usize) -> &mut V {
        &mut self.values[i]
    }
}
