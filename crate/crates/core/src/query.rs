//! Query files: what to compute about a program.
//!
//! A query is a list of `;`-terminated directives:
//!
//! ```text
//! init: 0.5 * point(c = 0) + 0.5 * point(c = 1);
//! post: iverson(x > 0);
//! hyper: E[6 * w - 5];
//! points;
//! triple: il {y == 42} {y == x};
//! pre: x > 0;  target: x == 0;
//! hyper_pre: NI(l);  hyper_post: GNI(l, h);
//! candidate: {l = 0, h = 1}, {l = 0, h = 7};
//! ```

use crate::error::{ParseError, Result};
use crate::expr::Expr;
use crate::hyper::{HyperPredicate, Hyperquantity, StatePredicate};
use crate::logic::Logic;
use crate::quantity::Quantity;
use crate::semantics::Engine;
use crate::semiring::{Semiring, SemiringKind};
use crate::syntax::{Parser, Tok};

type PResult<T> = std::result::Result<T, ParseError>;

/// A quantity before it is given a semiring and a state space.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantityExpr {
    /// Point mass; unnamed variables are 0.
    Point(Vec<(String, i64)>),
    Iverson(Expr),
    /// `1/|Σ|` everywhere in the probability semiring, `one` elsewhere.
    Uniform,
    /// `σ ↦ ⟦e⟧(σ)`, also used for constants.
    Value(Expr),
    Add(Box<QuantityExpr>, Box<QuantityExpr>),
    Mul(Box<QuantityExpr>, Box<QuantityExpr>),
}

impl QuantityExpr {
    pub fn eval<S: Semiring>(&self, engine: &Engine<S>) -> Result<Quantity<S::Value>> {
        let s = &engine.semiring;
        let space = &engine.space;
        Ok(match self {
            QuantityExpr::Point(pairs) => {
                let id = space.id_of(pairs.iter().map(|(v, x)| (v.as_str(), *x)))?;
                Quantity::point(s, space, id)
            }
            QuantityExpr::Iverson(b) => Quantity::indicator(s, &engine.evaluator().mask(b)?),
            QuantityExpr::Uniform => match s.kind() {
                SemiringKind::Prob => Quantity::constant(space, s.from_real(1.0 / space.size() as f64)?),
                _ => Quantity::one(s, space),
            },
            QuantityExpr::Value(e) => Quantity::from_expr(s, space, e)?,
            QuantityExpr::Add(a, b) => a.eval(engine)?.add(s, &b.eval(engine)?)?,
            QuantityExpr::Mul(a, b) => a.eval(engine)?.mul(s, &b.eval(engine)?),
        })
    }
}

impl std::fmt::Display for QuantityExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QuantityExpr::Point(ps) => {
                let ps: Vec<String> = ps.iter().map(|(v, x)| format!("{v} = {x}")).collect();
                write!(f, "point({})", ps.join(", "))
            }
            QuantityExpr::Iverson(b) => write!(f, "iverson({b})"),
            QuantityExpr::Uniform => f.write_str("uniform"),
            QuantityExpr::Value(Expr::Real(r)) => f.write_str(&crate::semiring::render_real(*r)),
            QuantityExpr::Value(e @ (Expr::Int(_) | Expr::Inf | Expr::One | Expr::Zero | Expr::Words(_) | Expr::Iverson(_))) => {
                write!(f, "{e}")
            }
            QuantityExpr::Value(e) => write!(f, "value({e})"),
            QuantityExpr::Add(a, b) => write!(f, "{a} + {b}"),
            QuantityExpr::Mul(a, b) => {
                let wrap = |q: &QuantityExpr| match q {
                    QuantityExpr::Add(..) => format!("({q})"),
                    q => q.to_string(),
                };
                write!(f, "{} * {}", wrap(a), wrap(b))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripleQuery {
    pub logic: Logic,
    pub pre: Expr,
    pub post: Expr,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Query {
    pub inits: Vec<QuantityExpr>,
    pub post: Option<QuantityExpr>,
    pub hyper: Option<Hyperquantity>,
    /// Evaluate at every point mass instead of at `init`.
    pub points: bool,
    pub triple: Option<TripleQuery>,
    pub pre: Option<Expr>,
    pub target: Option<Expr>,
    pub hyper_pre: Option<HyperPredicate>,
    pub hyper_post: Option<HyperPredicate>,
    pub candidate: Option<Vec<Vec<(String, i64)>>>,
}

pub fn parse_query(src: &str) -> Result<Query> {
    let mut p = Parser::new(src)?;
    let mut q = Query::default();
    while !p.at_eof() {
        let at = p.clone();
        let key = p.ident()?;
        if key == "points" {
            q.points = true;
        } else {
            p.expect_sym(":")?;
            match key.as_str() {
                "init" => q.inits.push(quantity(&mut p)?),
                "post" => q.post = Some(quantity(&mut p)?),
                "hyper" => q.hyper = Some(hyperquantity(&mut p)?),
                "triple" => q.triple = Some(triple(&mut p)?),
                "pre" => q.pre = Some(p.expr()?),
                "target" => q.target = Some(p.expr()?),
                "hyper_pre" => q.hyper_pre = Some(hyper_predicate(&mut p)?),
                "hyper_post" => q.hyper_post = Some(hyper_predicate(&mut p)?),
                "candidate" => {
                    let mut states = vec![assignment_set(&mut p)?];
                    while p.eat_sym(",") {
                        states.push(assignment_set(&mut p)?);
                    }
                    q.candidate = Some(states);
                }
                _ => return Err(at.error(format!("unknown directive `{key}`")).into()),
            }
        }
        if !p.at_eof() {
            p.expect_sym(";")?;
        }
    }
    Ok(q)
}

pub fn parse_quantity(src: &str) -> Result<QuantityExpr> {
    let mut p = Parser::new(src)?;
    let q = quantity(&mut p)?;
    p.finish()?;
    Ok(q)
}

pub fn parse_hyperquantity(src: &str) -> Result<Hyperquantity> {
    let mut p = Parser::new(src)?;
    let q = hyperquantity(&mut p)?;
    p.finish()?;
    Ok(q)
}

pub fn parse_hyper_predicate(src: &str) -> Result<HyperPredicate> {
    let mut p = Parser::new(src)?;
    let q = hyper_predicate(&mut p)?;
    p.finish()?;
    Ok(q)
}

/// Resolves `{x = 0, y = 1}` style states against the engine's space.
pub fn resolve_states<S: Semiring>(engine: &Engine<S>, states: &[Vec<(String, i64)>]) -> Result<Vec<usize>> {
    states.iter().map(|s| engine.space.id_of(s.iter().map(|(v, x)| (v.as_str(), *x)))).collect()
}

fn triple(p: &mut Parser) -> PResult<TripleQuery> {
    let name = p.ident()?;
    let logic = Logic::parse(&name).ok_or_else(|| p.error(format!("unknown logic `{name}`; expected hl, lisbon, pil or il")))?;
    let braced = |p: &mut Parser| -> PResult<Expr> {
        p.expect_sym("{")?;
        let e = p.expr()?;
        p.expect_sym("}")?;
        Ok(e)
    };
    let pre = braced(p)?;
    let post = braced(p)?;
    Ok(TripleQuery { logic, pre, post })
}

fn assignment_set(p: &mut Parser) -> PResult<Vec<(String, i64)>> {
    p.expect_sym("{")?;
    let pairs = assignments(p, "}")?;
    p.expect_sym("}")?;
    Ok(pairs)
}

fn assignments(p: &mut Parser, close: &str) -> PResult<Vec<(String, i64)>> {
    let mut out = Vec::new();
    if p.is_sym(close) {
        return Ok(out);
    }
    loop {
        let v = p.ident()?;
        p.expect_sym("=")?;
        out.push((v, p.int()?));
        if !p.eat_sym(",") {
            return Ok(out);
        }
    }
}

// ---- quantities ----

// `n` or `n / m`
fn fraction(p: &mut Parser) -> PResult<f64> {
    let n = p.number()?;
    if p.eat_sym("/") {
        let d = p.number()?;
        if d == 0.0 {
            return Err(p.error("division by zero"));
        }
        return Ok(n / d);
    }
    Ok(n)
}

fn quantity(p: &mut Parser) -> PResult<QuantityExpr> {
    let mut q = quantity_product(p)?;
    while p.eat_sym("+") {
        q = QuantityExpr::Add(Box::new(q), Box::new(quantity_product(p)?));
    }
    Ok(q)
}

fn quantity_product(p: &mut Parser) -> PResult<QuantityExpr> {
    let mut q = quantity_atom(p)?;
    while p.eat_sym("*") {
        q = QuantityExpr::Mul(Box::new(q), Box::new(quantity_atom(p)?));
    }
    Ok(q)
}

fn quantity_atom(p: &mut Parser) -> PResult<QuantityExpr> {
    if p.eat_sym("(") {
        let q = quantity(p)?;
        p.expect_sym(")")?;
        return Ok(q);
    }
    if let Tok::Ident(w) = p.peek().clone() {
        let call = matches!(p.peek_at(1), Tok::Sym("("));
        match w.as_str() {
            "uniform" => {
                p.bump();
                return Ok(QuantityExpr::Uniform);
            }
            "point" if call => {
                p.bump();
                p.expect_sym("(")?;
                let pairs = assignments(p, ")")?;
                p.expect_sym(")")?;
                return Ok(QuantityExpr::Point(pairs));
            }
            "iverson" | "value" if call => {
                p.bump();
                p.expect_sym("(")?;
                let e = p.expr()?;
                p.expect_sym(")")?;
                return Ok(if w == "iverson" { QuantityExpr::Iverson(e) } else { QuantityExpr::Value(e) });
            }
            _ => {}
        }
    }
    // constants: numbers, `inf`, `one`, `zero`, `lang{..}`, `[b]`
    let e = match p.peek().clone() {
        Tok::Sym("-") | Tok::Int(_) | Tok::Real(_) => Expr::Real(fraction(p)?),
        Tok::Ident(w) if w == "inf" => {
            p.bump();
            Expr::Inf
        }
        Tok::Ident(w) if matches!(w.as_str(), "one" | "zero" | "lang") => {
            p.bump();
            match w.as_str() {
                "one" => Expr::One,
                "zero" => Expr::Zero,
                _ => p.lang_literal()?,
            }
        }
        Tok::Sym("[") => {
            p.bump();
            let b = p.expr()?;
            p.expect_sym("]")?;
            Expr::iverson(b)
        }
        t => return Err(p.error(format!("expected a quantity, found {t:?}"))),
    };
    Ok(QuantityExpr::Value(e))
}

// ---- hyperquantities ----

fn hyperquantity(p: &mut Parser) -> PResult<Hyperquantity> {
    let mut h = hyper_product(p)?;
    loop {
        if p.eat_sym("+") {
            h = h.add(hyper_product(p)?);
        } else if p.eat_sym("-") {
            h = h.sub(hyper_product(p)?);
        } else {
            return Ok(h);
        }
    }
}

fn hyper_product(p: &mut Parser) -> PResult<Hyperquantity> {
    let mut h = hyper_unary(p)?;
    while p.eat_sym("*") {
        let r = hyper_unary(p)?;
        h = match h {
            Hyperquantity::Const(k) if k >= 0.0 => r.scale(k),
            h => h.mul(r),
        };
    }
    Ok(h)
}

// `k k- ff`
fn hyper_unary(p: &mut Parser) -> PResult<Hyperquantity> {
    let h = hyper_atom(p)?;
    if let Hyperquantity::Const(k) = h {
        if p.is_word("k") && matches!(p.peek_at(1), Tok::Sym("-")) {
            p.bump();
            p.bump();
            return Ok(hyper_unary(p)?.k_minus(k));
        }
    }
    Ok(h)
}

/// `[e]` or `[e | b]`, the latter observing `b` first.
fn bracket(p: &mut Parser) -> PResult<(Expr, Option<Expr>)> {
    p.expect_sym("[")?;
    let e = p.expr()?;
    let filter = if p.eat_sym("|") { Some(p.expr()?) } else { None };
    p.expect_sym("]")?;
    Ok((e, filter))
}

fn observed(h: Hyperquantity, filter: Option<Expr>) -> Hyperquantity {
    match filter {
        Some(b) => h.observe(b),
        None => h,
    }
}

fn hyper_atom(p: &mut Parser) -> PResult<Hyperquantity> {
    use Hyperquantity as H;
    match p.peek().clone() {
        Tok::Sym("(") => {
            p.bump();
            let h = hyperquantity(p)?;
            p.expect_sym(")")?;
            Ok(h)
        }
        Tok::Sym("[") => {
            p.bump();
            let hp = hyper_predicate(p)?;
            p.expect_sym("]")?;
            Ok(H::Iverson(hp))
        }
        Tok::Int(_) | Tok::Real(_) => Ok(H::Const(fraction(p)?)),
        Tok::Ident(w) => {
            let bracketed = matches!(p.peek_at(1), Tok::Sym("["));
            match w.as_str() {
                "inf" if !bracketed => Ok(H::Const(p.number()?)),
                "E" | "Var" | "sup" | "inf" | "sup_up" | "inf_down" if bracketed => {
                    p.bump();
                    let (e, filter) = bracket(p)?;
                    let h = match w.as_str() {
                        "E" => H::Expect(e),
                        "Var" => H::Var(e),
                        "sup" => H::SupSupport(e),
                        "inf" => H::InfSupport(e),
                        "sup_up" => H::SupSupportGuarded(e),
                        _ => H::InfSupportGuarded(e),
                    };
                    Ok(observed(h, filter))
                }
                "Cov" if bracketed => {
                    p.bump();
                    p.expect_sym("[")?;
                    let a = p.expr()?;
                    p.expect_sym(",")?;
                    let b = p.expr()?;
                    let filter = if p.eat_sym("|") { Some(p.expr()?) } else { None };
                    p.expect_sym("]")?;
                    Ok(observed(H::Cov(a, b), filter))
                }
                "maxval" if bracketed => {
                    p.bump();
                    p.expect_sym("[")?;
                    let e = if p.is_sym("]") { Expr::Bool(true) } else { p.expr()? };
                    p.expect_sym("]")?;
                    Ok(H::SupValue(StatePredicate::Expr(e)))
                }
                "min" | "max" | "observe" => {
                    p.bump();
                    p.expect_sym("(")?;
                    let h = if w == "observe" {
                        let b = p.expr()?;
                        p.expect_sym(",")?;
                        hyperquantity(p)?.observe(b)
                    } else {
                        let a = hyperquantity(p)?;
                        p.expect_sym(",")?;
                        let b = hyperquantity(p)?;
                        if w == "min" {
                            a.min(b)
                        } else {
                            a.max(b)
                        }
                    };
                    p.expect_sym(")")?;
                    Ok(h)
                }
                _ => Ok(H::Iverson(hyper_predicate_atom(p)?)),
            }
        }
        t => Err(p.error(format!("expected a hyperquantity, found {t:?}"))),
    }
}

// ---- hyper predicates ----

fn hyper_predicate(p: &mut Parser) -> PResult<HyperPredicate> {
    let mut h = hyper_conj(p)?;
    while p.eat_sym("||") {
        h = HyperPredicate::Or(Box::new(h), Box::new(hyper_conj(p)?));
    }
    Ok(h)
}

fn hyper_conj(p: &mut Parser) -> PResult<HyperPredicate> {
    let mut h = hyper_neg(p)?;
    while p.eat_sym("&&") {
        h = HyperPredicate::And(Box::new(h), Box::new(hyper_neg(p)?));
    }
    Ok(h)
}

fn hyper_neg(p: &mut Parser) -> PResult<HyperPredicate> {
    if p.eat_sym("!") {
        return Ok(HyperPredicate::Not(Box::new(hyper_neg(p)?)));
    }
    if p.eat_sym("(") {
        let h = hyper_predicate(p)?;
        p.expect_sym(")")?;
        return Ok(h);
    }
    hyper_predicate_atom(p)
}

fn names(p: &mut Parser) -> PResult<Vec<String>> {
    let mut out = vec![p.ident()?];
    while p.is_sym(",") && matches!(p.peek_at(1), Tok::Ident(_)) {
        p.bump();
        out.push(p.ident()?);
    }
    Ok(out)
}

fn hyper_predicate_atom(p: &mut Parser) -> PResult<HyperPredicate> {
    use HyperPredicate as P;
    let at = p.clone();
    let w = p.ident()?;
    let state_pred = |p: &mut Parser| -> PResult<StatePredicate> {
        p.expect_sym("(")?;
        let e = p.expr()?;
        p.expect_sym(")")?;
        Ok(StatePredicate::Expr(e))
    };
    Ok(match w.as_str() {
        "true" => P::True,
        "box" => P::Box(state_pred(p)?),
        "diamond" => P::Diamond(state_pred(p)?),
        "superset" => P::Superset(state_pred(p)?),
        "exactly" => P::Exactly(state_pred(p)?),
        "card" => {
            p.expect_sym("==")?;
            let k = p.int()?;
            P::CardEq(usize::try_from(k).map_err(|_| p.error("cardinality must be nonnegative"))?)
        }
        "NI" | "low" => {
            p.expect_sym("(")?;
            let vs = names(p)?;
            p.expect_sym(")")?;
            P::Low(vs)
        }
        // `GNI(l, h)` or `GNI(l1, l2; h1, h2)`
        "GNI" => {
            p.expect_sym("(")?;
            let first = names(p)?;
            let (low, high) = if p.eat_sym(";") {
                (first, names(p)?)
            } else if first.len() == 2 {
                (vec![first[0].clone()], vec![first[1].clone()])
            } else {
                return Err(p.error("GNI takes `low, high` or `lows; highs`"));
            };
            p.expect_sym(")")?;
            P::GLow { low, high }
        }
        _ => return Err(at.error(format!("unknown hyper predicate `{w}`"))),
    })
}
