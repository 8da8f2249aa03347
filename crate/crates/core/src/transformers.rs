//! Strongest post and weakest pre on quantities, rule by rule and through
//! the matrix semantics.

use crate::error::{Error, Result};
use crate::program::Program;
use crate::quantity::Quantity;
use crate::semantics::{Engine, FixpointStats, WeightMatrix};
use crate::semiring::Semiring;

impl<S: Semiring> Engine<S> {
    /// `sp⟦C⟧(μ)` by the transformer rules.
    ///
    /// Domain overflow is only checked on the support of the incoming
    /// quantity, so unreachable out-of-range writes are harmless here.
    pub fn sp(&self, p: &Program, mu: &Quantity<S::Value>) -> Result<Quantity<S::Value>> {
        Ok(self.sp_stats(p, mu)?.0)
    }

    pub fn sp_stats(&self, p: &Program, mu: &Quantity<S::Value>) -> Result<(Quantity<S::Value>, FixpointStats)> {
        let mut stats = FixpointStats::exact();
        let q = self.sp_in(p, mu.clone(), &mut stats)?;
        Ok((q, stats))
    }

    fn sp_in(&self, p: &Program, f: Quantity<S::Value>, stats: &mut FixpointStats) -> Result<Quantity<S::Value>> {
        let s = &self.semiring;
        let space = &self.space;
        let ev = self.evaluator();
        let n = space.size();
        Ok(match p {
            // ⊕_α f[x/α] ⊙ [x = e[x/α]]: each σ = τ[x/α] in the support
            // feeds the single τ its assignment reaches. Visiting σ in id
            // order sums each τ over ascending α.
            Program::Assign(x, e) => {
                let i = space.require(x)?;
                let mut env = vec![0; space.vars().len()];
                let mut out = Quantity::zero(s, space);
                for sigma in 0..n {
                    if s.is_zero(&f[sigma]) {
                        continue;
                    }
                    space.decode_into(sigma, &mut env);
                    let tau = space.with_value(sigma, i, ev.assigned_value(i, e, sigma, &env)?);
                    out[tau] = s.add(&out[tau], &f[sigma])?;
                }
                out
            }
            // ⊕_α f[x/α]
            Program::NondetAssign(x) => {
                let i = space.require(x)?;
                let mut out = Quantity::zero(s, space);
                for tau in 0..n {
                    let vals = (0..space.domain()).map(|a| f[space.with_value(tau, i, a)].clone());
                    out[tau] = s.big_add(vals)?;
                }
                out
            }
            Program::Weight(w) => f.mul(s, &Quantity::from_expr(s, space, w)?),
            Program::Seq(a, b) => {
                let mid = self.sp_in(a, f, stats)?;
                self.sp_in(b, mid, stats)?
            }
            Program::Choice(a, b) => {
                let l = self.sp_in(a, f.clone(), stats)?;
                let r = self.sp_in(b, f, stats)?;
                l.add(s, &r)?
            }
            // (lfp X. f ⊕ sp⟦C⟧(X ⊙ e)) ⊙ e′
            Program::Loop(c, e, x) => {
                let enter = Quantity::from_expr(s, space, e)?;
                let exit = Quantity::from_expr(s, space, x)?;
                let mut cur = Quantity::zero(s, space);
                let mut k = 0;
                let fixed = loop {
                    k += 1;
                    if k > self.config.max_iters {
                        return Err(Error::FixpointBudgetExceeded { max_iters: self.config.max_iters });
                    }
                    let body = self.sp_in(c, cur.mul(s, &enter), stats).map_err(|err| at_unrolling(err, k - 1))?;
                    let next = f.add(s, &body)?;
                    if let Some(bound) = self.converged(&cur.values, &next.values, &enter.values, 1) {
                        stats.record(k, bound);
                        break next;
                    }
                    cur = next;
                };
                fixed.mul(s, &exit)
            }
        })
    }

    /// `wp⟦C⟧(f)` by the transformer rules.
    pub fn wp(&self, p: &Program, f: &Quantity<S::Value>) -> Result<Quantity<S::Value>> {
        Ok(self.wp_stats(p, f)?.0)
    }

    pub fn wp_stats(&self, p: &Program, f: &Quantity<S::Value>) -> Result<(Quantity<S::Value>, FixpointStats)> {
        let mut stats = FixpointStats::exact();
        let q = self.wp_in(p, f.clone(), &mut stats)?;
        Ok((q, stats))
    }

    fn wp_in(&self, p: &Program, f: Quantity<S::Value>, stats: &mut FixpointStats) -> Result<Quantity<S::Value>> {
        let s = &self.semiring;
        let space = &self.space;
        let ev = self.evaluator();
        let n = space.size();
        Ok(match p {
            // f[x/e]
            Program::Assign(x, e) => {
                let i = space.require(x)?;
                let mut env = vec![0; space.vars().len()];
                let mut out = Vec::with_capacity(n);
                for id in 0..n {
                    space.decode_into(id, &mut env);
                    let v = ev.assigned_value(i, e, id, &env)?;
                    out.push(f[space.with_value(id, i, v)].clone());
                }
                Quantity::new(out)
            }
            Program::NondetAssign(x) => {
                let i = space.require(x)?;
                let mut out = Quantity::zero(s, space);
                for id in 0..n {
                    out[id] = s.big_add((0..space.domain()).map(|a| f[space.with_value(id, i, a)].clone()))?;
                }
                out
            }
            Program::Weight(w) => Quantity::from_expr(s, space, w)?.mul(s, &f),
            Program::Seq(a, b) => {
                let mid = self.wp_in(b, f, stats)?;
                self.wp_in(a, mid, stats)?
            }
            Program::Choice(a, b) => {
                let l = self.wp_in(a, f.clone(), stats)?;
                let r = self.wp_in(b, f, stats)?;
                l.add(s, &r)?
            }
            // lfp X. e′ ⊙ f ⊕ e ⊙ wp⟦C⟧(X)
            Program::Loop(c, e, x) => {
                let enter = Quantity::from_expr(s, space, e)?;
                let base = Quantity::from_expr(s, space, x)?.mul(s, &f);
                let mut cur = Quantity::zero(s, space);
                let mut k = 0;
                loop {
                    k += 1;
                    if k > self.config.max_iters {
                        return Err(Error::FixpointBudgetExceeded { max_iters: self.config.max_iters });
                    }
                    let body = enter.mul(s, &self.wp_in(c, cur.clone(), stats)?);
                    let next = base.add(s, &body)?;
                    if let Some(bound) = self.converged(&cur.values, &next.values, &enter.values, 1) {
                        stats.record(k, bound);
                        break next;
                    }
                    cur = next;
                }
            }
        })
    }

    /// `τ ↦ ⊕_σ μ(σ) ⊙ ⟦C⟧(σ, τ)`.
    pub fn sp_via_matrix(&self, p: &Program, mu: &Quantity<S::Value>) -> Result<Quantity<S::Value>> {
        self.sp_from_matrix(&self.denote(p)?, mu)
    }

    /// `sp` through an already computed `⟦C⟧`.
    pub fn sp_from_matrix(&self, m: &WeightMatrix<S::Value>, mu: &Quantity<S::Value>) -> Result<Quantity<S::Value>> {
        let s = &self.semiring;
        let n = self.space.size();
        let mut out = Quantity::zero(s, &self.space);
        for tau in 0..n {
            let terms = (0..n).filter(|&sigma| !s.is_zero(&mu[sigma])).map(|sigma| s.mul(&mu[sigma], m.get(sigma, tau)));
            out[tau] = s.big_add(terms)?;
        }
        Ok(out)
    }

    /// `σ ↦ ⊕_τ ⟦C⟧(σ, τ) ⊙ f(τ)`.
    pub fn wp_via_matrix(&self, p: &Program, f: &Quantity<S::Value>) -> Result<Quantity<S::Value>> {
        self.wp_from_matrix(&self.denote(p)?, f)
    }

    /// `wp` through an already computed `⟦C⟧`.
    pub fn wp_from_matrix(&self, m: &WeightMatrix<S::Value>, f: &Quantity<S::Value>) -> Result<Quantity<S::Value>> {
        let s = &self.semiring;
        let mut out = Quantity::zero(s, &self.space);
        for sigma in 0..self.space.size() {
            out[sigma] = s.big_add(m.row(sigma).iter().zip(&f.values).map(|(w, v)| s.mul(w, v)))?;
        }
        Ok(out)
    }
}

// Tags a domain overflow with the loop body execution it happened in; the
// innermost loop wins.
fn at_unrolling(err: Error, k: usize) -> Error {
    match err {
        Error::DomainOverflow { var, value, domain, state, unrolling: None } => {
            Error::DomainOverflow { var, value, domain, state, unrolling: Some(k) }
        }
        other => other,
    }
}
