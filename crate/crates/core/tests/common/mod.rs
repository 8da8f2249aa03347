//! Seeded random programs, quantities and state expressions for the
//! property suites.
#![allow(dead_code)]

pub mod suites;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use whp_core::expr::BinOp;
use whp_core::{Boolean, HyperPredicate, Hyperquantity, StatePredicate, Expr, Lang, LangValue, MaxMin, Prob, Program, Quantity, Semiring, StateSpace, Tropical};

pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Paths a loop-free program can take from one state, counting every branch.
pub fn branching(p: &Program, domain: i64) -> u64 {
    match p {
        Program::NondetAssign(_) => domain as u64,
        Program::Seq(a, b) => branching(a, domain).saturating_mul(branching(b, domain)),
        Program::Choice(a, b) => branching(a, domain).saturating_add(branching(b, domain)),
        Program::Loop(..) => u64::MAX,
        _ => 1,
    }
}

pub const MAX_BRANCHING: u64 = 256;

/// Semirings the generators know how to draw weights and values for.
pub trait Sampled: Semiring + Sized {
    /// Weighted branching stays a subdistribution.
    const PROBABILISTIC: bool = false;
    /// Comparison tolerance; zero means exact.
    const TOL: f64 = 0.0;
    fn sample(&self, rng: &mut Rand) -> Self::Value;
    fn weight_expr(&self, rng: &mut Rand, space: &StateSpace) -> Expr;
}

impl Sampled for Boolean {
    fn sample(&self, rng: &mut Rand) -> bool {
        rng.gen_bool(0.5)
    }

    fn weight_expr(&self, rng: &mut Rand, space: &StateSpace) -> Expr {
        match rng.gen_range(0..4) {
            0 => Expr::Zero,
            1 => Expr::One,
            _ => Expr::iverson(bool_expr(rng, space)),
        }
    }
}

impl Sampled for Prob {
    const PROBABILISTIC: bool = true;
    const TOL: f64 = 1e-9;

    fn sample(&self, rng: &mut Rand) -> f64 {
        rng.gen_range(0..=8) as f64 / 8.0
    }

    fn weight_expr(&self, rng: &mut Rand, space: &StateSpace) -> Expr {
        match rng.gen_range(0..4) {
            0 => Expr::real(rng.gen_range(0..=4) as f64 / 4.0),
            1 => Expr::iverson(bool_expr(rng, space)),
            2 => Expr::ite(bool_expr(rng, space), Expr::real(0.5), Expr::real(0.75)),
            _ => Expr::One,
        }
    }
}

impl Sampled for Tropical {
    fn sample(&self, rng: &mut Rand) -> f64 {
        if rng.gen_bool(0.2) {
            f64::INFINITY
        } else {
            rng.gen_range(0..10) as f64
        }
    }

    fn weight_expr(&self, rng: &mut Rand, space: &StateSpace) -> Expr {
        match rng.gen_range(0..4) {
            0 => Expr::Zero,
            1 => Expr::int(rng.gen_range(0..5)),
            2 => Expr::ite(bool_expr(rng, space), Expr::int(1), Expr::int(3)),
            _ => int_expr(rng, space),
        }
    }
}

impl Sampled for MaxMin {
    fn sample(&self, rng: &mut Rand) -> f64 {
        match rng.gen_range(0..6) {
            0 => f64::NEG_INFINITY,
            1 => f64::INFINITY,
            _ => rng.gen_range(0..6) as f64,
        }
    }

    fn weight_expr(&self, rng: &mut Rand, space: &StateSpace) -> Expr {
        match rng.gen_range(0..4) {
            0 => Expr::Zero,
            1 => Expr::One,
            _ => int_expr(rng, space),
        }
    }
}

const WORDS: [&str; 7] = ["eps", "a", "b", "ab", "ba", "aa", "bb"];

impl Sampled for Lang {
    fn sample(&self, rng: &mut Rand) -> LangValue {
        let n = rng.gen_range(0..3);
        self.words(WORDS.choose_multiple(rng, n).copied())
    }

    fn weight_expr(&self, rng: &mut Rand, _space: &StateSpace) -> Expr {
        let n = rng.gen_range(0..3);
        Expr::words(WORDS.choose_multiple(rng, n).copied())
    }
}

/// One of the fixed shapes, all with at most 64 states.
pub fn space(rng: &mut Rand) -> StateSpace {
    match rng.gen_range(0..3) {
        0 => StateSpace::new(["x", "y"], 4).unwrap(),
        1 => StateSpace::new(["x", "y"], 8).unwrap(),
        _ => StateSpace::new(["x", "y", "z"], 4).unwrap(),
    }
}

fn var(rng: &mut Rand, space: &StateSpace) -> Expr {
    Expr::var(space.vars().choose(rng).unwrap())
}

/// Integer expression with values in `0..D`.
pub fn int_expr(rng: &mut Rand, space: &StateSpace) -> Expr {
    let d = space.domain();
    match rng.gen_range(0..5) {
        0 => Expr::int(rng.gen_range(0..d)),
        1 => var(rng, space),
        2 => Expr::bin(BinOp::Mod, var(rng, space).add(Expr::int(rng.gen_range(1..d))), Expr::int(d)),
        3 => Expr::bin(BinOp::Mod, var(rng, space).add(var(rng, space)), Expr::int(d)),
        _ => Expr::bin(BinOp::Mod, var(rng, space).mul(var(rng, space)), Expr::int(d)),
    }
}

pub fn bool_expr(rng: &mut Rand, space: &StateSpace) -> Expr {
    let atom = |rng: &mut Rand| match rng.gen_range(0..3) {
        0 => var(rng, space).lt(int_expr(rng, space)),
        1 => var(rng, space).eq(int_expr(rng, space)),
        _ => var(rng, space).le(var(rng, space)),
    };
    match rng.gen_range(0..4) {
        0 => atom(rng).and(atom(rng)),
        1 => Expr::not(atom(rng)),
        _ => atom(rng),
    }
}

fn leaf<S: Sampled>(s: &S, rng: &mut Rand, space: &StateSpace) -> Program {
    let x = space.vars().choose(rng).unwrap().clone();
    match rng.gen_range(0..6) {
        0 | 1 => Program::assign(&x, int_expr(rng, space)),
        2 if !S::PROBABILISTIC => Program::nondet(&x),
        2 | 3 => Program::weight(s.weight_expr(rng, space)),
        4 => Program::assume(bool_expr(rng, space)),
        _ => Program::skip(),
    }
}

fn tree<S: Sampled>(s: &S, rng: &mut Rand, space: &StateSpace, depth: u32) -> Program {
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(s, rng, space);
    }
    let a = tree(s, rng, space, depth - 1);
    let b = tree(s, rng, space, depth - 1);
    match rng.gen_range(0..3) {
        0 => Program::seq(a, b),
        1 => Program::ite(bool_expr(rng, space), a, b),
        _ if S::PROBABILISTIC => {
            let p = rng.gen_range(1..4) as f64 / 4.0;
            Program::choice(Program::seq(Program::weight(Expr::real(p)), a), Program::seq(Program::weight(Expr::real(1.0 - p)), b))
        }
        _ => Program::choice(a, b),
    }
}

/// Loop-free program of depth at most 4 with bounded branching.
pub fn program<S: Sampled>(s: &S, rng: &mut Rand, space: &StateSpace) -> Program {
    loop {
        let p = tree(s, rng, space, 4);
        if branching(&p, space.domain()) <= MAX_BRANCHING {
            return p;
        }
    }
}

/// Arbitrary quantity; a subdistribution for probabilistic semirings.
pub fn quantity<S: Sampled>(s: &S, rng: &mut Rand, space: &StateSpace) -> Quantity<S::Value> {
    let values: Vec<S::Value> = (0..space.size()).map(|_| s.sample(rng)).collect();
    if !S::PROBABILISTIC {
        return Quantity::new(values);
    }
    let total: f64 = values.iter().map(|v| s.to_real(v).unwrap()).sum();
    let mass: f64 = rng.gen_range(1..=4) as f64 / 4.0;
    Quantity::new(values.iter().map(|v| s.from_real(s.to_real(v).unwrap() * mass / total.max(1.0)).unwrap()).collect())
}

/// Quantity with values in the unit interval, for backward transformers.
pub fn post<S: Sampled>(s: &S, rng: &mut Rand, space: &StateSpace) -> Quantity<S::Value> {
    Quantity::new((0..space.size()).map(|_| s.sample(rng)).collect())
}

pub fn lang() -> Lang {
    Lang::new(3)
}

/// Every numeric entry equal, up to `tol` for floats; exact when `tol == 0`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol
}

/// Equal up to `tol`, relative once magnitudes exceed one.
pub fn close_rel(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn nonneg_expr(rng: &mut Rand, space: &StateSpace) -> Expr {
    if rng.gen_bool(0.3) {
        Expr::ite(bool_expr(rng, space), Expr::int(1), Expr::int(0))
    } else {
        int_expr(rng, space)
    }
}

fn scalar(rng: &mut Rand) -> f64 {
    *[0.0, 0.5, 1.0, 2.0, 3.0].choose(rng).unwrap()
}

/// Linear hyperquantity whose value cannot hit `∞ − ∞`. Expectation
/// atoms only for probabilistic semirings.
pub fn linear_hq<S: Sampled>(rng: &mut Rand, space: &StateSpace, depth: u32) -> Hyperquantity {
    if S::PROBABILISTIC && rng.gen_bool(0.6) {
        finite_hq(rng, space, depth)
    } else {
        extreme_hq::<S>(rng, space, depth)
    }
}

fn finite_hq(rng: &mut Rand, space: &StateSpace, depth: u32) -> Hyperquantity {
    use Hyperquantity::*;
    if depth == 0 || rng.gen_bool(0.4) {
        return match rng.gen_range(0..4) {
            0 => Expect(int_expr(rng, space)),
            1 => Var(int_expr(rng, space)),
            2 => Cov(int_expr(rng, space), int_expr(rng, space)),
            _ => Const(scalar(rng)),
        };
    }
    let a = finite_hq(rng, space, depth - 1);
    match rng.gen_range(0..6) {
        0 => a.add(finite_hq(rng, space, depth - 1)),
        1 => a.sub(finite_hq(rng, space, depth - 1)),
        2 => a.mul(finite_hq(rng, space, depth - 1)),
        3 => a.scale(scalar(rng)),
        4 => a.k_minus(scalar(rng)),
        _ => a.observe(bool_expr(rng, space)),
    }
}

fn extreme_hq<S: Sampled>(rng: &mut Rand, space: &StateSpace, depth: u32) -> Hyperquantity {
    use Hyperquantity::*;
    if depth == 0 || rng.gen_bool(0.4) {
        return if rng.gen_bool(0.5) { SupSupport(int_expr(rng, space)) } else { InfSupport(int_expr(rng, space)) };
    }
    let a = extreme_hq::<S>(rng, space, depth - 1);
    let b = linear_hq::<S>(rng, space, depth - 1);
    match rng.gen_range(0..4) {
        0 => a.max(b),
        1 => a.min(b),
        2 => a.scale(*[0.5, 2.0, 3.0].choose(rng).unwrap()),
        _ => a.observe(bool_expr(rng, space)),
    }
}

fn state_pred(rng: &mut Rand, space: &StateSpace) -> StatePredicate {
    if rng.gen_bool(0.8) {
        StatePredicate::Expr(bool_expr(rng, space))
    } else {
        let n = rng.gen_range(0..4);
        StatePredicate::States((0..n).map(|_| rng.gen_range(0..space.size())).collect())
    }
}

pub fn hyper_predicate(rng: &mut Rand, space: &StateSpace, depth: u32) -> HyperPredicate {
    use HyperPredicate::*;
    if depth == 0 || rng.gen_bool(0.6) {
        return match rng.gen_range(0..7) {
            0 => Box(state_pred(rng, space)),
            1 => Diamond(state_pred(rng, space)),
            2 => Superset(state_pred(rng, space)),
            3 => CardEq(rng.gen_range(0..4)),
            4 => HyperPredicate::low(&["x"]),
            5 => HyperPredicate::glow("x", "y"),
            _ => True,
        };
    }
    let a = std::boxed::Box::new(hyper_predicate(rng, space, depth - 1));
    match rng.gen_range(0..3) {
        0 => Not(a),
        1 => And(a, std::boxed::Box::new(hyper_predicate(rng, space, depth - 1))),
        _ => Or(a, std::boxed::Box::new(hyper_predicate(rng, space, depth - 1))),
    }
}

/// Nonnegative hyperquantity, not necessarily linear. Expectations and
/// value lookups only where the semiring has numeric values.
pub fn hq<S: Sampled>(rng: &mut Rand, space: &StateSpace, numeric: bool, depth: u32) -> Hyperquantity {
    use Hyperquantity::*;
    if depth == 0 || rng.gen_bool(0.35) {
        return match rng.gen_range(0..8) {
            0 => Const(scalar(rng)),
            1 | 2 => Iverson(hyper_predicate(rng, space, 2)),
            3 => SupSupport(nonneg_expr(rng, space)).max(Const(0.0)),
            4 => InfSupport(nonneg_expr(rng, space)),
            5 => SupSupportGuarded(nonneg_expr(rng, space)),
            6 if numeric => SupValue(state_pred(rng, space)).max(Const(0.0)),
            7 if S::PROBABILISTIC => Expect(nonneg_expr(rng, space)),
            _ => InfSupportGuarded(nonneg_expr(rng, space)).max(Const(1.0)),
        };
    }
    let a = hq::<S>(rng, space, numeric, depth - 1);
    match rng.gen_range(0..6) {
        0 => a.add(hq::<S>(rng, space, numeric, depth - 1)),
        1 => a.mul(hq::<S>(rng, space, numeric, depth - 1)),
        2 => a.max(hq::<S>(rng, space, numeric, depth - 1)),
        3 => a.min(hq::<S>(rng, space, numeric, depth - 1)),
        4 => a.scale(scalar(rng)),
        _ => a.observe(bool_expr(rng, space)),
    }
}

// ∞ · 0 = 0
pub fn times(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}
