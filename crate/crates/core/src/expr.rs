//! Arithmetic, boolean and weight expressions.
//!
//! One expression type serves all three roles. Evaluation produces a
//! [`Val`]; the `eval_*` helpers coerce it to the kind a position expects.
//! In weight positions numbers are embedded with [`Semiring::from_real`] and
//! booleans become Iverson brackets. `+` and `*` with a weight operand are
//! `⊕` and `⊙`.

use std::fmt;

use crate::error::{Error, Result};
use crate::semiring::Semiring;
use crate::state::StateSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Mod,
    Max,
    Min,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Mod => "%",
            BinOp::Max => "max",
            BinOp::Min => "min",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(i64),
    Real(f64),
    Bool(bool),
    /// `+∞` as a real number.
    Inf,
    /// The semiring's `1`.
    One,
    /// The semiring's `0`.
    Zero,
    /// Language literal; `""` is the empty word.
    Words(Vec<String>),
    Var(String),
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Iverson(Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
    /// Restricts an integer to the domain.
    Clamp(Box<Expr>),
    /// The real number a weight denotes.
    AsReal(Box<Expr>),
    /// Whether a weight differs from the semiring's `0`.
    NonZero(Box<Expr>),
    /// `body` evaluated with `var` rebound to `value`; explicit substitution
    /// `body[var/value]`. The bound value may lie outside the domain.
    Let(String, Box<Expr>, Box<Expr>),
    /// Maximum of `body` over all domain values of `var`.
    MaxOver(String, Box<Expr>),
    MinOver(String, Box<Expr>),
}

// Terse constructors for building expressions in code.
impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn int(v: i64) -> Expr {
        Expr::Int(v)
    }

    pub fn real(v: f64) -> Expr {
        Expr::Real(v)
    }

    /// Word literal; `eps` is the empty word.
    pub fn words<'a>(ws: impl IntoIterator<Item = &'a str>) -> Expr {
        Expr::Words(ws.into_iter().map(|w| if w == "eps" { String::new() } else { w.to_string() }).collect())
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn iverson(b: Expr) -> Expr {
        Expr::Iverson(Box::new(b))
    }

    pub fn not(b: Expr) -> Expr {
        Expr::Not(Box::new(b))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn ite(c: Expr, a: Expr, b: Expr) -> Expr {
        Expr::Ite(Box::new(c), Box::new(a), Box::new(b))
    }

    pub fn let_in(var: &str, value: Expr, body: Expr) -> Expr {
        Expr::Let(var.to_string(), Box::new(value), Box::new(body))
    }

    pub fn add(self, o: Expr) -> Expr {
        Expr::bin(BinOp::Add, self, o)
    }

    pub fn sub(self, o: Expr) -> Expr {
        Expr::bin(BinOp::Sub, self, o)
    }

    pub fn mul(self, o: Expr) -> Expr {
        Expr::bin(BinOp::Mul, self, o)
    }

    pub fn eq(self, o: Expr) -> Expr {
        Expr::bin(BinOp::Eq, self, o)
    }

    pub fn lt(self, o: Expr) -> Expr {
        Expr::bin(BinOp::Lt, self, o)
    }

    pub fn le(self, o: Expr) -> Expr {
        Expr::bin(BinOp::Le, self, o)
    }

    pub fn gt(self, o: Expr) -> Expr {
        Expr::bin(BinOp::Gt, self, o)
    }

    pub fn and(self, o: Expr) -> Expr {
        Expr::bin(BinOp::And, self, o)
    }

    pub fn or(self, o: Expr) -> Expr {
        Expr::bin(BinOp::Or, self, o)
    }

    /// Free state variables, in first-occurrence order.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone())
                }
            }
            Expr::Neg(a) | Expr::Not(a) | Expr::Iverson(a) | Expr::Clamp(a) | Expr::AsReal(a) | Expr::NonZero(a) => {
                a.collect_vars(out)
            }
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Ite(c, a, b) => {
                c.collect_vars(out);
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Let(_, v, b) => {
                v.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::MaxOver(_, b) | Expr::MinOver(_, b) => b.collect_vars(out),
            _ => {}
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Real(v) => {
                if v.is_infinite() {
                    f.write_str(if *v > 0.0 { "inf" } else { "-inf" })
                } else {
                    write!(f, "{v:?}")
                }
            }
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Inf => f.write_str("inf"),
            Expr::One => f.write_str("one"),
            Expr::Zero => f.write_str("zero"),
            Expr::Words(ws) => {
                f.write_str("lang{")?;
                for (i, w) in ws.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(if w.is_empty() { "eps" } else { w })?;
                }
                f.write_str("}")
            }
            Expr::Var(v) => f.write_str(v),
            Expr::Neg(a) => write!(f, "-{a}"),
            Expr::Not(a) => write!(f, "!{a}"),
            Expr::Bin(op @ (BinOp::Max | BinOp::Min), a, b) => write!(f, "{}({a}, {b})", op.symbol()),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Iverson(b) => write!(f, "[{b}]"),
            Expr::Ite(c, a, b) => write!(f, "ite({c}, {a}, {b})"),
            Expr::Clamp(a) => write!(f, "clamp({a})"),
            Expr::AsReal(a) => write!(f, "real({a})"),
            Expr::NonZero(a) => write!(f, "nonzero({a})"),
            Expr::Let(x, v, b) => write!(f, "{b}[{x}/{v}]"),
            Expr::MaxOver(x, b) => write!(f, "max_{x}({b})"),
            Expr::MinOver(x, b) => write!(f, "min_{x}({b})"),
        }
    }
}

/// Result of evaluating an expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Val<U> {
    Int(i64),
    Real(f64),
    Bool(bool),
    Weight(U),
}

impl<U> Val<U> {
    fn kind(&self) -> &'static str {
        match self {
            Val::Int(_) => "integer",
            Val::Real(_) => "real",
            Val::Bool(_) => "boolean",
            Val::Weight(_) => "weight",
        }
    }
}

/// Evaluates expressions in a fixed semiring and state space.
///
/// Environments are plain valuations in variable order; they need not lie in
/// the domain (`Let` can push values outside it).
#[derive(Debug, Clone, Copy)]
pub struct Evaluator<'a, S> {
    pub semiring: &'a S,
    pub space: &'a StateSpace,
}

impl<'a, S: Semiring> Evaluator<'a, S> {
    pub fn new(semiring: &'a S, space: &'a StateSpace) -> Self {
        Evaluator { semiring, space }
    }

    pub fn eval(&self, e: &Expr, env: &[i64]) -> Result<Val<S::Value>> {
        let s = self.semiring;
        Ok(match e {
            Expr::Int(v) => Val::Int(*v),
            Expr::Real(v) => Val::Real(*v),
            Expr::Bool(b) => Val::Bool(*b),
            Expr::Inf => Val::Real(f64::INFINITY),
            Expr::One => Val::Weight(s.one()),
            Expr::Zero => Val::Weight(s.zero()),
            Expr::Words(ws) => Val::Weight(s.from_words(ws)?),
            Expr::Var(x) => Val::Int(env[self.space.require(x)?]),
            Expr::Neg(a) => match self.eval(a, env)? {
                Val::Int(v) => Val::Int(v.checked_neg().ok_or_else(|| Error::ArithmeticOverflow(e.to_string()))?),
                Val::Real(v) => Val::Real(-v),
                other => return Err(mismatch(e, "number", &other)),
            },
            Expr::Not(a) => Val::Bool(!self.eval_bool(a, env)?),
            Expr::Bin(op, a, b) => self.binary(e, *op, a, b, env)?,
            Expr::Iverson(b) => Val::Weight(s.iverson(self.eval_bool(b, env)?)),
            Expr::Ite(c, a, b) => {
                if self.eval_bool(c, env)? {
                    self.eval(a, env)?
                } else {
                    self.eval(b, env)?
                }
            }
            Expr::Clamp(a) => Val::Int(self.eval_int(a, env)?.clamp(0, self.space.domain() - 1)),
            Expr::AsReal(a) => Val::Real(self.eval_real(a, env)?),
            Expr::NonZero(a) => Val::Bool(!s.is_zero(&self.eval_weight(a, env)?)),
            Expr::Let(x, v, body) => {
                let i = self.space.require(x)?;
                let v = self.eval_int(v, env)?;
                let mut inner = env.to_vec();
                inner[i] = v;
                self.eval(body, &inner)?
            }
            Expr::MaxOver(x, body) | Expr::MinOver(x, body) => {
                let i = self.space.require(x)?;
                let mut inner = env.to_vec();
                let mut acc = if matches!(e, Expr::MaxOver(..)) { f64::NEG_INFINITY } else { f64::INFINITY };
                for a in 0..self.space.domain() {
                    inner[i] = a;
                    let v = self.eval_real(body, &inner)?;
                    acc = if matches!(e, Expr::MaxOver(..)) { acc.max(v) } else { acc.min(v) };
                }
                Val::Real(acc)
            }
        })
    }

    fn binary(&self, e: &Expr, op: BinOp, a: &Expr, b: &Expr, env: &[i64]) -> Result<Val<S::Value>> {
        use BinOp::*;
        // short-circuit connectives
        if op == And || op == Or {
            let l = self.eval_bool(a, env)?;
            if (op == And && !l) || (op == Or && l) {
                return Ok(Val::Bool(l));
            }
            return Ok(Val::Bool(self.eval_bool(b, env)?));
        }
        let l = self.eval(a, env)?;
        let r = self.eval(b, env)?;
        let s = self.semiring;
        let overflow = || Error::ArithmeticOverflow(e.to_string());
        Ok(match (op, l, r) {
            (Add | Mul, l @ Val::Weight(_), r) | (Add | Mul, l, r @ Val::Weight(_)) => {
                let x = self.weight_of(e, l)?;
                let y = self.weight_of(e, r)?;
                Val::Weight(if op == Add { s.add(&x, &y)? } else { s.mul(&x, &y) })
            }
            (Sub, l @ Val::Weight(_), r) | (Sub, l, r @ Val::Weight(_)) => {
                let x = self.real_of(e, &l)?;
                let y = self.real_of(e, &r)?;
                Val::Weight(s.from_real(x - y)?)
            }
            (Add, Val::Int(x), Val::Int(y)) => Val::Int(x.checked_add(y).ok_or_else(overflow)?),
            (Sub, Val::Int(x), Val::Int(y)) => Val::Int(x.checked_sub(y).ok_or_else(overflow)?),
            (Mul, Val::Int(x), Val::Int(y)) => Val::Int(x.checked_mul(y).ok_or_else(overflow)?),
            (Mod, Val::Int(x), Val::Int(y)) => {
                if y == 0 {
                    return Err(overflow());
                }
                Val::Int(x.rem_euclid(y))
            }
            (Max | Min, Val::Int(x), Val::Int(y)) => Val::Int(if op == Max { x.max(y) } else { x.min(y) }),
            (Add | Sub | Mul | Max | Min, l, r) => {
                let x = self.number(e, &l)?;
                let y = self.number(e, &r)?;
                Val::Real(match op {
                    Add => x + y,
                    Sub => x - y,
                    // ∞ · 0 = 0
                    Mul => {
                        if x == 0.0 || y == 0.0 {
                            0.0
                        } else {
                            x * y
                        }
                    }
                    Max => x.max(y),
                    _ => x.min(y),
                })
            }
            (Eq | Ne, Val::Bool(x), Val::Bool(y)) => Val::Bool((x == y) == (op == Eq)),
            (Eq | Ne | Lt | Le | Gt | Ge, Val::Int(x), Val::Int(y)) => Val::Bool(compare(op, x.cmp(&y))),
            (Eq | Ne | Lt | Le | Gt | Ge, l, r) => {
                let x = self.real_of(e, &l)?;
                let y = self.real_of(e, &r)?;
                match x.partial_cmp(&y) {
                    Some(o) => Val::Bool(compare(op, o)),
                    None => return Err(mismatch(e, "comparable numbers", &l)),
                }
            }
            (_, l, _) => return Err(mismatch(e, "integer", &l)),
        })
    }

    fn number(&self, e: &Expr, v: &Val<S::Value>) -> Result<f64> {
        match v {
            Val::Int(x) => Ok(*x as f64),
            Val::Real(x) => Ok(*x),
            other => Err(mismatch(e, "number", other)),
        }
    }

    fn real_of(&self, e: &Expr, v: &Val<S::Value>) -> Result<f64> {
        match v {
            Val::Int(x) => Ok(*x as f64),
            Val::Real(x) => Ok(*x),
            Val::Bool(b) => Ok(if *b { 1.0 } else { 0.0 }),
            Val::Weight(w) => self.semiring.to_real(w).ok_or_else(|| Error::SemiringNotNumeric {
                semiring: self.semiring.name(),
                what: e.to_string(),
            }),
        }
    }

    fn weight_of(&self, _e: &Expr, v: Val<S::Value>) -> Result<S::Value> {
        Ok(match v {
            Val::Weight(w) => w,
            Val::Bool(b) => self.semiring.iverson(b),
            Val::Int(x) => self.semiring.from_real(x as f64)?,
            Val::Real(x) => self.semiring.from_real(x)?,
        })
    }

    pub fn eval_int(&self, e: &Expr, env: &[i64]) -> Result<i64> {
        match self.eval(e, env)? {
            Val::Int(v) => Ok(v),
            other => Err(mismatch(e, "integer", &other)),
        }
    }

    pub fn eval_bool(&self, e: &Expr, env: &[i64]) -> Result<bool> {
        match self.eval(e, env)? {
            Val::Bool(v) => Ok(v),
            other => Err(mismatch(e, "boolean", &other)),
        }
    }

    pub fn eval_weight(&self, e: &Expr, env: &[i64]) -> Result<S::Value> {
        let v = self.eval(e, env)?;
        self.weight_of(e, v)
    }

    /// Reals, integers, booleans as 0/1, and weights through `to_real`.
    pub fn eval_real(&self, e: &Expr, env: &[i64]) -> Result<f64> {
        let v = self.eval(e, env)?;
        self.real_of(e, &v)
    }

    /// Evaluates the right-hand side of `x := e` in state `id` and applies
    /// the overflow policy.
    pub fn assigned_value(&self, var: usize, e: &Expr, id: usize, env: &[i64]) -> Result<i64> {
        let v = self.eval_int(e, env)?;
        self.space.store(var, v, id)
    }

    /// Tabulates `e` as a weight over all states.
    pub fn weights(&self, e: &Expr) -> Result<Vec<S::Value>> {
        let mut env = vec![0; self.space.vars().len()];
        (0..self.space.size())
            .map(|id| {
                self.space.decode_into(id, &mut env);
                self.eval_weight(e, &env)
            })
            .collect()
    }

    /// Tabulates `e` as a predicate over all states.
    pub fn mask(&self, e: &Expr) -> Result<Vec<bool>> {
        let mut env = vec![0; self.space.vars().len()];
        (0..self.space.size())
            .map(|id| {
                self.space.decode_into(id, &mut env);
                self.eval_bool(e, &env)
            })
            .collect()
    }
}

fn compare(op: BinOp, o: std::cmp::Ordering) -> bool {
    use std::cmp::Ordering::*;
    match op {
        BinOp::Eq => o == Equal,
        BinOp::Ne => o != Equal,
        BinOp::Lt => o == Less,
        BinOp::Le => o != Greater,
        BinOp::Gt => o == Greater,
        BinOp::Ge => o != Less,
        _ => unreachable!("not a comparison"),
    }
}

fn mismatch<U>(e: &Expr, expected: &'static str, found: &Val<U>) -> Error {
    Error::TypeMismatch { expr: e.to_string(), expected, found: found.kind() }
}
