//! Syntactic `whp` for linear hyperquantities.
//!
//! Every linear atom is `𝔼[b]`, `⋎[b]` or `⋏[b]` for a state expression
//! `b`, and each program construct rewrites `b`. `Var` and `Cov` are
//! expanded into expectations first and observations are pushed into the
//! atoms; pointwise combinators are transformed argument by argument.

use crate::error::{Error, Result};
use crate::expr::{BinOp, Expr};
use crate::program::Program;
use crate::semantics::Engine;
use crate::semiring::{Semiring, SemiringKind};
use crate::state::OverflowMode;

use super::{Hyperquantity, StatePredicate};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Atom {
    Expect,
    Sup,
    Inf,
}

impl<S: Semiring> Engine<S> {
    /// `whp⟦C⟧(ff)` by the rules for linear posts.
    pub fn whp_linear(&self, p: &Program, ff: &Hyperquantity) -> Result<Hyperquantity> {
        let ff = self.normalize(ff)?;
        self.transform(p, &ff)
    }

    fn transform(&self, p: &Program, ff: &Hyperquantity) -> Result<Hyperquantity> {
        use Hyperquantity::*;
        let t = |a: &Hyperquantity| self.transform(p, a).map(Box::new);
        Ok(match ff {
            Const(k) => Const(*k),
            Expect(b) => {
                if self.semiring.kind() != SemiringKind::Prob {
                    return Err(Error::SemiringMismatch {
                        what: format!("linear rules for {ff}"),
                        expected: "prob".into(),
                        found: self.semiring.name(),
                    });
                }
                Expect(self.atom(p, Atom::Expect, b)?)
            }
            SupSupport(b) => SupSupport(self.atom(p, Atom::Sup, b)?),
            InfSupport(b) => InfSupport(self.atom(p, Atom::Inf, b)?),
            Add(a, b) => Add(t(a)?, t(b)?),
            Mul(a, b) => Mul(t(a)?, t(b)?),
            Sub(a, b) => Sub(t(a)?, t(b)?),
            Min(a, b) => Min(t(a)?, t(b)?),
            Max(a, b) => Max(t(a)?, t(b)?),
            ScalarMul(r, a) => ScalarMul(*r, t(a)?),
            KMinus(k, a) => KMinus(*k, t(a)?),
            other => return Err(Error::LinearityViolation { node: other.to_string() }),
        })
    }

    fn atom(&self, p: &Program, kind: Atom, body: &Expr) -> Result<Expr> {
        Ok(match p {
            // b[x/e]
            Program::Assign(x, e) => {
                let v = match self.space.overflow() {
                    OverflowMode::Clamp => Expr::Clamp(Box::new(e.clone())),
                    OverflowMode::Strict => e.clone(),
                };
                Expr::let_in(x, v, body.clone())
            }
            Program::NondetAssign(x) => match kind {
                Atom::Sup => Expr::MaxOver(x.clone(), Box::new(body.clone())),
                Atom::Inf => Expr::MinOver(x.clone(), Box::new(body.clone())),
                Atom::Expect => return Err(Error::LinearityViolation { node: p.to_string() }),
            },
            Program::Weight(w) => match kind {
                Atom::Expect => Expr::bin(BinOp::Mul, body.clone(), Expr::AsReal(Box::new(w.clone()))),
                Atom::Sup => Expr::ite(Expr::NonZero(Box::new(w.clone())), body.clone(), Expr::Real(f64::NEG_INFINITY)),
                Atom::Inf => Expr::ite(Expr::NonZero(Box::new(w.clone())), body.clone(), Expr::Inf),
            },
            Program::Seq(a, b) => {
                let inner = self.atom(b, kind, body)?;
                self.atom(a, kind, &inner)?
            }
            Program::Choice(a, b) => join(kind, self.atom(a, kind, body)?, self.atom(b, kind, body)?),
            // ⊕_n W_eⁿ(b ⊙ e′), W_e(X) = whp⟦C⟧(X) ⊙ e
            Program::Loop(c, e, x) => {
                let step = Program::seq(Program::Weight(e.clone()), (**c).clone());
                let base = self.atom(&Program::Weight(x.clone()), kind, body)?;
                let mut cur = base.clone();
                let mut table = self.tabulate(&cur)?;
                for _ in 0..self.config.max_iters {
                    let next = join(kind, base.clone(), self.atom(&step, kind, &cur)?);
                    let next_table = self.tabulate(&next)?;
                    let done = match kind {
                        Atom::Expect => table
                            .iter()
                            .zip(&next_table)
                            .all(|(a, b)| a == b || (a - b).abs() < self.config.epsilon),
                        Atom::Sup | Atom::Inf => table == next_table,
                    };
                    cur = next;
                    table = next_table;
                    if done {
                        return Ok(cur);
                    }
                }
                return Err(Error::FixpointBudgetExceeded { max_iters: self.config.max_iters });
            }
        })
    }

    fn tabulate(&self, e: &Expr) -> Result<Vec<f64>> {
        let ev = self.evaluator();
        let mut env = vec![0; self.space.vars().len()];
        (0..self.space.size())
            .map(|id| {
                self.space.decode_into(id, &mut env);
                ev.eval_real(e, &env)
            })
            .collect()
    }

    /// Expands `Var`/`Cov` and pushes observations down to the atoms.
    fn normalize(&self, ff: &Hyperquantity) -> Result<Hyperquantity> {
        use Hyperquantity::*;
        let n = |a: &Hyperquantity| self.normalize(a).map(Box::new);
        Ok(match ff {
            Const(_) | Expect(_) | SupSupport(_) | InfSupport(_) => ff.clone(),
            Var(e) => covariance(e, e),
            Cov(a, b) => covariance(a, b),
            Observe(p, inner) => observe(&self.predicate_expr(p), &self.normalize(inner)?),
            Add(a, b) => Add(n(a)?, n(b)?),
            Mul(a, b) => Mul(n(a)?, n(b)?),
            Sub(a, b) => Sub(n(a)?, n(b)?),
            Min(a, b) => Min(n(a)?, n(b)?),
            Max(a, b) => Max(n(a)?, n(b)?),
            ScalarMul(r, a) => ScalarMul(*r, n(a)?),
            KMinus(k, a) => KMinus(*k, n(a)?),
            SupSupportGuarded(_) | InfSupportGuarded(_) | SupValue(_) | Iverson(_) => {
                return Err(Error::LinearityViolation { node: ff.to_string() })
            }
        })
    }

    fn predicate_expr(&self, p: &StatePredicate) -> Expr {
        match p {
            StatePredicate::Expr(e) => e.clone(),
            StatePredicate::States(ids) => ids
                .iter()
                .map(|&id| {
                    self.space
                        .vars()
                        .iter()
                        .enumerate()
                        .map(|(i, v)| Expr::var(v).eq(Expr::int(self.space.value(id, i))))
                        .reduce(Expr::and)
                        .unwrap_or(Expr::Bool(true))
                })
                .reduce(Expr::or)
                .unwrap_or(Expr::Bool(false)),
        }
    }
}

fn join(kind: Atom, a: Expr, b: Expr) -> Expr {
    match kind {
        Atom::Expect => a.add(b),
        Atom::Sup => Expr::bin(BinOp::Max, a, b),
        Atom::Inf => Expr::bin(BinOp::Min, a, b),
    }
}

// Cov[a, b] = 𝔼[ab] − 𝔼[a]·𝔼[b]
fn covariance(a: &Expr, b: &Expr) -> Hyperquantity {
    Hyperquantity::Expect(a.clone().mul(b.clone()))
        .sub(Hyperquantity::Expect(a.clone()).mul(Hyperquantity::Expect(b.clone())))
}

fn observe(p: &Expr, ff: &Hyperquantity) -> Hyperquantity {
    use Hyperquantity::*;
    let o = |a: &Hyperquantity| Box::new(observe(p, a));
    match ff {
        Expect(b) => Expect(Expr::ite(p.clone(), b.clone(), Expr::int(0))),
        SupSupport(b) => SupSupport(Expr::ite(p.clone(), b.clone(), Expr::Real(f64::NEG_INFINITY))),
        InfSupport(b) => InfSupport(Expr::ite(p.clone(), b.clone(), Expr::Inf)),
        Add(a, b) => Add(o(a), o(b)),
        Mul(a, b) => Mul(o(a), o(b)),
        Sub(a, b) => Sub(o(a), o(b)),
        Min(a, b) => Min(o(a), o(b)),
        Max(a, b) => Max(o(a), o(b)),
        ScalarMul(r, a) => ScalarMul(*r, o(a)),
        KMinus(k, a) => KMinus(*k, o(a)),
        other => other.clone(),
    }
}
