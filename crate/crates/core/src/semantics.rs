//! Denotational semantics as dense weight matrices, and the fixpoint policy
//! shared by every loop computation.

use crate::error::{Error, Result};
use crate::expr::Evaluator;
use crate::program::Program;
use crate::semiring::{Semiring, SemiringKind};
use crate::state::StateSpace;

/// Largest number of matrix entries `|Σ|²`.
pub const MATRIX_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixpointConfig {
    pub max_iters: usize,
    /// Stopping threshold on the largest entry change, non-idempotent
    /// semirings only.
    pub epsilon: f64,
}

impl Default for FixpointConfig {
    fn default() -> Self {
        FixpointConfig { max_iters: 10_000, epsilon: 1e-12 }
    }
}

/// What the fixpoint iterations of one computation did.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FixpointStats {
    /// Loop fixpoints computed, counting nested ones once per evaluation.
    pub loops: usize,
    pub iterations: usize,
    pub max_iterations: usize,
    /// Upper bound on the mass cut off by stopping early: `Some(0)` when all
    /// loops converged exactly, `None` when no bound is derivable.
    pub truncation_bound: Option<f64>,
}

impl FixpointStats {
    pub fn exact() -> Self {
        FixpointStats { truncation_bound: Some(0.0), ..Default::default() }
    }

    pub(crate) fn record(&mut self, iterations: usize, bound: Option<f64>) {
        self.loops += 1;
        self.iterations += iterations;
        self.max_iterations = self.max_iterations.max(iterations);
        self.truncation_bound = match (self.truncation_bound, bound) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
    }
}

/// Dense `|Σ| × |Σ|` matrix; row is the initial state, column the final one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix<V> {
    n: usize,
    data: Vec<V>,
}

impl<V: Clone> WeightMatrix<V> {
    pub fn filled(n: usize, v: V) -> Self {
        WeightMatrix { n, data: vec![v; n * n] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, from: usize, to: usize) -> &V {
        &self.data[from * self.n + to]
    }

    pub fn set(&mut self, from: usize, to: usize, v: V) {
        self.data[from * self.n + to] = v;
    }

    pub fn row(&self, from: usize) -> &[V] {
        &self.data[from * self.n..(from + 1) * self.n]
    }

    pub fn entries(&self) -> &[V] {
        &self.data
    }
}

/// The pieces of `⟨C⟩⟨e, e′⟩` that `Φ` needs.
#[derive(Debug, Clone)]
pub struct LoopData<V> {
    pub body: WeightMatrix<V>,
    pub enter: Vec<V>,
    pub exit: Vec<V>,
}

/// Evaluation context: a semiring, a state space and a fixpoint policy.
#[derive(Debug, Clone)]
pub struct Engine<S: Semiring> {
    pub semiring: S,
    pub space: StateSpace,
    pub config: FixpointConfig,
}

impl<S: Semiring> Engine<S> {
    pub fn new(semiring: S, space: StateSpace) -> Self {
        Engine { semiring, space, config: FixpointConfig::default() }
    }

    pub fn with_config(mut self, config: FixpointConfig) -> Self {
        self.config = config;
        self
    }

    pub fn evaluator(&self) -> Evaluator<'_, S> {
        Evaluator::new(&self.semiring, &self.space)
    }

    pub fn matrix_fits(&self) -> bool {
        self.space.size().checked_mul(self.space.size()).is_some_and(|n| n <= MATRIX_CAP)
    }

    /// `⟦C⟧` as a matrix.
    pub fn denote(&self, p: &Program) -> Result<WeightMatrix<S::Value>> {
        Ok(self.denote_stats(p)?.0)
    }

    pub fn denote_stats(&self, p: &Program) -> Result<(WeightMatrix<S::Value>, FixpointStats)> {
        if !self.matrix_fits() {
            let n = self.space.size() as u128;
            return Err(Error::StateSpaceTooLarge { size: n * n, cap: MATRIX_CAP });
        }
        let mut stats = FixpointStats::exact();
        let m = self.denote_in(p, &mut stats)?;
        Ok((m, stats))
    }

    fn denote_in(&self, p: &Program, stats: &mut FixpointStats) -> Result<WeightMatrix<S::Value>> {
        let s = &self.semiring;
        let n = self.space.size();
        let ev = self.evaluator();
        let mut env = vec![0; self.space.vars().len()];
        Ok(match p {
            Program::Assign(x, e) => {
                let i = self.space.require(x)?;
                let mut m = WeightMatrix::filled(n, s.zero());
                for id in 0..n {
                    self.space.decode_into(id, &mut env);
                    let v = ev.assigned_value(i, e, id, &env)?;
                    m.set(id, self.space.with_value(id, i, v), s.one());
                }
                m
            }
            Program::NondetAssign(x) => {
                let i = self.space.require(x)?;
                let mut m = WeightMatrix::filled(n, s.zero());
                for id in 0..n {
                    for a in 0..self.space.domain() {
                        m.set(id, self.space.with_value(id, i, a), s.one());
                    }
                }
                m
            }
            Program::Weight(e) => diagonal(s, &ev.weights(e)?),
            Program::Seq(a, b) => {
                let a = self.denote_in(a, stats)?;
                let b = self.denote_in(b, stats)?;
                self.product(&a, &b)?
            }
            Program::Choice(a, b) => {
                let a = self.denote_in(a, stats)?;
                let b = self.denote_in(b, stats)?;
                let data = a.data.iter().zip(&b.data).map(|(x, y)| s.add(x, y)).collect::<Result<_, _>>()?;
                WeightMatrix { n, data }
            }
            Program::Loop(c, e, x) => {
                let data = LoopData { body: self.denote_in(c, stats)?, enter: ev.weights(e)?, exit: ev.weights(x)? };
                let mut cur = WeightMatrix::filled(n, s.zero());
                let mut k = 0;
                loop {
                    k += 1;
                    if k > self.config.max_iters {
                        return Err(Error::FixpointBudgetExceeded { max_iters: self.config.max_iters });
                    }
                    let next = self.loop_step(&data, &cur)?;
                    if let Some(bound) = self.converged(&cur.data, &next.data, &data.enter, n) {
                        stats.record(k, bound);
                        break next;
                    }
                    cur = next;
                }
            }
        })
    }

    /// `Φ_{C,e,e′}(X)(σ,τ) = e(σ) ⊙ (⊕_ι ⟦C⟧(σ,ι) ⊙ X(ι,τ)) ⊕ e′(σ) ⊙ [σ = τ]`.
    pub fn loop_step(&self, data: &LoopData<S::Value>, x: &WeightMatrix<S::Value>) -> Result<WeightMatrix<S::Value>> {
        let s = &self.semiring;
        let mut out = self.product(&data.body, x)?;
        for from in 0..out.n {
            for to in 0..out.n {
                let v = s.mul(&data.enter[from], out.get(from, to));
                let v = if from == to { s.add(&v, &data.exit[from])? } else { v };
                out.set(from, to, v);
            }
        }
        Ok(out)
    }

    /// Semiring matrix product; each entry sums over `ι` in ascending order.
    pub fn product(&self, a: &WeightMatrix<S::Value>, b: &WeightMatrix<S::Value>) -> Result<WeightMatrix<S::Value>> {
        let s = &self.semiring;
        let n = a.n;
        let mut out = WeightMatrix::filled(n, s.zero());
        for from in 0..n {
            let row = &mut out.data[from * n..(from + 1) * n];
            for mid in 0..n {
                let w = a.get(from, mid);
                if s.is_zero(w) {
                    continue;
                }
                for (to, acc) in row.iter_mut().enumerate() {
                    let y = b.get(mid, to);
                    if s.is_zero(y) {
                        continue;
                    }
                    *acc = s.add(acc, &s.mul(w, y))?;
                }
            }
        }
        Ok(out)
    }

    /// Convergence test between successive iterates of `n`-row objects.
    /// Returns the truncation bound when converged.
    pub(crate) fn converged(&self, prev: &[S::Value], next: &[S::Value], enter: &[S::Value], rows: usize) -> Option<Option<f64>> {
        let s = &self.semiring;
        if s.is_idempotent() || prev == next {
            return (prev == next).then_some(Some(0.0));
        }
        let mut max = 0.0f64;
        for (a, b) in prev.iter().zip(next) {
            let d = s.distance(a, b);
            if !(d < self.config.epsilon) {
                return None;
            }
            max = max.max(d);
        }
        Some(self.truncation_bound(prev, next, enter, rows))
    }

    /// `‖Δ‖ · q / (1 − q)` with `q = sup e`, for Prob loops with `q < 1`.
    fn truncation_bound(&self, prev: &[S::Value], next: &[S::Value], enter: &[S::Value], rows: usize) -> Option<f64> {
        let s = &self.semiring;
        if s.kind() != SemiringKind::Prob {
            return None;
        }
        let q = enter.iter().filter_map(|v| s.to_real(v)).fold(0.0, f64::max);
        if q >= 1.0 {
            return None;
        }
        let width = prev.len() / rows.max(1);
        let delta = prev
            .chunks(width.max(1))
            .zip(next.chunks(width.max(1)))
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| s.distance(x, y)).sum::<f64>())
            .fold(0.0, f64::max);
        Some(delta * q / (1.0 - q))
    }
}

fn diagonal<S: Semiring>(s: &S, d: &[S::Value]) -> WeightMatrix<S::Value> {
    let mut m = WeightMatrix::filled(d.len(), s.zero());
    for (i, v) in d.iter().enumerate() {
        m.set(i, i, v.clone());
    }
    m
}
