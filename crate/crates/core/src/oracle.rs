//! Brute-force reference: enumerate every execution path and sum weights.

use crate::error::{Error, Result};
use crate::program::Program;
use crate::quantity::Quantity;
use crate::semantics::Engine;
use crate::semiring::Semiring;

pub const DEFAULT_UNROLL: usize = 32;
pub const DEFAULT_PATH_BUDGET: usize = 1_000_000;

/// One execution path: the state and weight after every atomic step.
#[derive(Debug, Clone, PartialEq)]
pub struct Path<V> {
    pub steps: Vec<(usize, V)>,
    pub final_state: usize,
    pub weight: V,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Paths<V> {
    pub paths: Vec<Path<V>>,
    /// Summed weight of prefixes cut off by the unroll bound.
    pub remainder: V,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<V> {
    pub quantity: Quantity<V>,
    pub remainder: V,
    pub paths: usize,
}

pub struct Oracle<'a, S: Semiring> {
    engine: &'a Engine<S>,
    pub unroll_bound: usize,
    pub path_budget: usize,
}

struct Walk<V> {
    trail: Vec<(usize, V)>,
    remainder: V,
    count: usize,
}

type Sink<'k, V> = dyn FnMut(&mut Walk<V>, usize, V) -> Result<()> + 'k;

impl<'a, S: Semiring> Oracle<'a, S> {
    pub fn new(engine: &'a Engine<S>) -> Self {
        Oracle { engine, unroll_bound: DEFAULT_UNROLL, path_budget: DEFAULT_PATH_BUDGET }
    }

    /// A loop's guard is examined at most `k` times per entry into the loop;
    /// iterating past the last examination is cut off into the remainder.
    pub fn unroll(mut self, k: usize) -> Self {
        self.unroll_bound = k;
        self
    }

    pub fn budget(mut self, n: usize) -> Self {
        self.path_budget = n;
        self
    }

    pub fn enumerate_paths(&self, p: &Program, sigma: usize) -> Result<Paths<S::Value>> {
        let mut out = Vec::new();
        let mut w = self.walk();
        let one = self.engine.semiring.one();
        self.run(&mut w, p, sigma, one, &mut |w: &mut Walk<S::Value>, tau, v| {
            out.push(Path { steps: w.trail.clone(), final_state: tau, weight: v });
            Ok(())
        })?;
        Ok(Paths { paths: out, remainder: w.remainder })
    }

    /// `τ ↦ ⊕_σ μ(σ) ⊙ (⊕ of path weights from σ to τ)`.
    pub fn sp(&self, p: &Program, mu: &Quantity<S::Value>) -> Result<Quantity<S::Value>> {
        Ok(self.sp_full(p, mu)?.quantity)
    }

    pub fn sp_full(&self, p: &Program, mu: &Quantity<S::Value>) -> Result<OracleResult<S::Value>> {
        let s = &self.engine.semiring;
        let mut acc = vec![s.zero(); self.engine.space.size()];
        let mut remainder = s.zero();
        let mut paths = 0;
        for sigma in mu.support(s) {
            let m = &mu[sigma];
            let mut w = self.walk();
            self.run(&mut w, p, sigma, m.clone(), &mut |_, tau, v| {
                acc[tau] = s.add(&acc[tau], &v)?;
                Ok(())
            })?;
            remainder = s.add(&remainder, &w.remainder)?;
            paths += w.count;
        }
        Ok(OracleResult { quantity: Quantity::new(acc), remainder, paths })
    }

    /// `σ ↦ ⊕ over paths from σ of (path weight) ⊙ f(τ)`.
    pub fn wp(&self, p: &Program, f: &Quantity<S::Value>) -> Result<Quantity<S::Value>> {
        let s = &self.engine.semiring;
        let n = self.engine.space.size();
        let mut out = Vec::with_capacity(n);
        for sigma in 0..n {
            let mut acc = s.zero();
            let mut w = self.walk();
            self.run(&mut w, p, sigma, s.one(), &mut |_, tau, v| {
                acc = s.add(&acc, &s.mul(&v, &f[tau]))?;
                Ok(())
            })?;
            out.push(acc);
        }
        Ok(Quantity::new(out))
    }

    fn walk(&self) -> Walk<S::Value> {
        Walk { trail: Vec::new(), remainder: self.engine.semiring.zero(), count: 0 }
    }

    fn run(&self, w: &mut Walk<S::Value>, p: &Program, sigma: usize, acc: S::Value, k: &mut Sink<'_, S::Value>) -> Result<()> {
        let budget = self.path_budget;
        self.exec(w, p, sigma, acc, &mut |w: &mut Walk<S::Value>, tau, v| {
            w.count += 1;
            if w.count > budget {
                return Err(Error::PathBudgetExceeded { limit: budget });
            }
            k(w, tau, v)
        })
    }

    fn step(&self, w: &mut Walk<S::Value>, tau: usize, acc: S::Value, k: &mut Sink<'_, S::Value>) -> Result<()> {
        w.trail.push((tau, acc.clone()));
        let r = k(w, tau, acc);
        w.trail.pop();
        r
    }

    fn exec(&self, w: &mut Walk<S::Value>, p: &Program, sigma: usize, acc: S::Value, k: &mut Sink<'_, S::Value>) -> Result<()> {
        let s = &self.engine.semiring;
        let space = &self.engine.space;
        let ev = self.engine.evaluator();
        match p {
            Program::Assign(x, e) => {
                let i = space.require(x)?;
                let env = space.decode(sigma).0;
                let v = ev.assigned_value(i, e, sigma, &env)?;
                self.step(w, space.with_value(sigma, i, v), acc, k)
            }
            Program::NondetAssign(x) => {
                let i = space.require(x)?;
                for a in 0..space.domain() {
                    self.step(w, space.with_value(sigma, i, a), acc.clone(), k)?;
                }
                Ok(())
            }
            Program::Weight(e) => {
                let acc = s.mul(&acc, &ev.eval_weight(e, &space.decode(sigma).0)?);
                if s.is_zero(&acc) {
                    return Ok(());
                }
                self.step(w, sigma, acc, k)
            }
            Program::Seq(a, b) => self.exec(w, a, sigma, acc, &mut |w: &mut Walk<S::Value>, mid, v| self.exec(w, b, mid, v, k)),
            Program::Choice(a, b) => {
                self.exec(w, a, sigma, acc.clone(), k)?;
                self.exec(w, b, sigma, acc, k)
            }
            Program::Loop(..) => self.iterate(w, p, sigma, acc, 1, k),
        }
    }

    fn iterate(&self, w: &mut Walk<S::Value>, p: &Program, sigma: usize, acc: S::Value, round: usize, k: &mut Sink<'_, S::Value>) -> Result<()> {
        let Program::Loop(body, enter, exit) = p else { unreachable!() };
        let s = &self.engine.semiring;
        let env = self.engine.space.decode(sigma).0;
        let ev = self.engine.evaluator();
        let out = s.mul(&acc, &ev.eval_weight(exit, &env)?);
        if !s.is_zero(&out) {
            self.step(w, sigma, out, k)?;
        }
        let go = s.mul(&acc, &ev.eval_weight(enter, &env)?);
        if s.is_zero(&go) {
            return Ok(());
        }
        if round >= self.unroll_bound {
            w.remainder = s.add(&w.remainder, &go)?;
            return Ok(());
        }
        w.trail.push((sigma, go.clone()));
        let r = self.exec(w, body, sigma, go, &mut |w: &mut Walk<S::Value>, tau, v| self.iterate(w, p, tau, v, round + 1, k));
        w.trail.pop();
        r
    }
}

impl<S: Semiring> Engine<S> {
    pub fn oracle(&self) -> Oracle<'_, S> {
        Oracle::new(self)
    }
}
