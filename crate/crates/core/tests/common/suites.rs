//! The differential, healthiness and logic suites, shared by their own
//! test targets and the acceptance run.

use rand::seq::SliceRandom;
use rand::Rng;
use whp_core::expr::BinOp;
use whp_core::logic::Logic;
use whp_core::{
    Boolean, Engine, Expr, HyperPredicate, HyperVerdict, Hyperquantity, Program, Quantity, StatePredicate, StateSpace, Strategy,
    Triple,
};

use super::{close_rel, times, Sampled};

pub const PROGRAMS: usize = 500;

pub struct Report {
    pub checked: usize,
    pub failures: Vec<String>,
}

/// Sp three ways, sp-wp duality, wp against the matrix sum, and (when
/// `linear`) `whp` against the syntactic linear rules.
pub fn differential<S: Sampled>(s: S, seed: u64, linear: bool) -> Report {
    let mut rng = super::rng(seed);
    let mut failures = Vec::new();
    let tol = S::TOL;
    for i in 0..PROGRAMS {
        let space = super::space(&mut rng);
        let p = super::program(&s, &mut rng, &space);
        let mu = super::quantity(&s, &mut rng, &space);
        let g = super::post(&s, &mut rng, &space);
        let ff = linear.then(|| super::linear_hq::<S>(&mut rng, &space, 3));
        let eng = Engine::new(s.clone(), space);
        let mut fail = |what: &str| failures.push(format!("{} #{i} {what}: {p}", s.name()));

        let rule = eng.sp(&p, &mu).unwrap();
        let matrix = eng.sp_via_matrix(&p, &mu).unwrap();
        let oracle = eng.oracle().sp(&p, &mu).unwrap();
        if !rule.approx_eq(&s, &matrix, tol) || !rule.approx_eq(&s, &oracle, tol) {
            fail("sp");
        }

        let wp = eng.wp(&p, &g).unwrap();
        let kozen = eng.wp_via_matrix(&p, &g).unwrap();
        let oracle_wp = eng.oracle().wp(&p, &g).unwrap();
        if !wp.approx_eq(&s, &kozen, tol) || !wp.approx_eq(&s, &oracle_wp, tol) {
            fail("wp");
        }

        let forward = rule.dot(&s, &g).unwrap();
        let backward = mu.dot(&s, &wp).unwrap();
        if !s.approx_eq(&forward, &backward, tol) {
            fail("duality");
        }

        if let Some(ff) = ff {
            let direct = eng.whp(&p, &ff).eval_signed(&mu).unwrap();
            let syntactic = eng.whp_linear(&p, &ff).unwrap();
            let via_rules = eng.eval_signed(&syntactic, &mu).unwrap();
            if !close_rel(direct, via_rules, tol) {
                fail(&format!("whp_linear {ff}: {direct} vs {via_rules}"));
            }
        }
    }
    Report { checked: PROGRAMS, failures }
}

pub const TUPLES: usize = 100;

pub fn healthiness<S: Sampled>(s: S, seed: u64, numeric: bool) -> Vec<String> {
    use Hyperquantity::Const;
    let mut rng = super::rng(seed);
    let mut failures = Vec::new();
    let tol = S::TOL;
    for i in 0..TUPLES {
        let space = super::space(&mut rng);
        let mut p = super::program(&s, &mut rng, &space);
        if rng.gen_bool(0.25) {
            let d = space.domain();
            let step = Expr::bin(BinOp::Mod, Expr::var("x").add(Expr::int(1)), Expr::int(d));
            let count = Program::while_loop(Expr::var("x").lt(Expr::int(d - 1)), Program::assign("x", step));
            p = Program::seq(p, count);
        }
        let f = super::quantity(&s, &mut rng, &space);
        let ff = super::hq::<S>(&mut rng, &space, numeric, 3);
        let gg = super::hq::<S>(&mut rng, &space, numeric, 3);
        let hh = super::hq::<S>(&mut rng, &space, numeric, 2);
        let r = *[0.0, 0.5, 2.0, 3.0].choose(&mut rng).unwrap();
        let k = *[0.0, 1.0, 2.5, 7.0, f64::INFINITY].choose(&mut rng).unwrap();
        let bound = *[1.0, 2.5, 7.0].choose(&mut rng).unwrap();

        let eng = Engine::new(s.clone(), space);
        let mut sampled = vec![f, Quantity::zero(&s, &eng.space)];
        // The all-one quantity is not a subdistribution.
        if !S::PROBABILISTIC {
            sampled.push(Quantity::one(&s, &eng.space));
        }
        sampled.extend((0..eng.space.size()).map(|id| Quantity::point(&s, &eng.space, id)));
        let matrix = eng.denote(&p).unwrap();
        for f in &sampled {
            let post = eng.sp_from_matrix(&matrix, f).unwrap();
            let at = |h: &Hyperquantity| eng.eval_hyper(h, &post).unwrap();
            let whp = |h: &Hyperquantity| eng.whp(&p, h).eval(f).unwrap();
            let mut check = |name: &str, ok: bool| {
                if !ok {
                    failures.push(format!("{} #{i} {name}: C = {p}, ff = {ff}, gg = {gg}", eng.semiring.name()));
                }
            };
            let (a, b, c) = (at(&ff), at(&gg), at(&hh));

            check("k-strictness", whp(&Const(k)) == k);

            check("monotone max", whp(&ff) <= whp(&ff.clone().max(gg.clone())));
            check("monotone sum", whp(&ff) <= whp(&ff.clone().add(gg.clone())));

            let lin = whp(&ff.clone().scale(r).add(gg.clone()));
            check("linearity", close_rel(lin, times(r, a) + b, tol));

            let mul = whp(&ff.clone().scale(r).mul(gg.clone()));
            check("multiplicativity", close_rel(mul, times(times(r, a), b), tol));

            let bounded = ff.clone().min(Const(bound));
            let dual = bound - whp(&bounded.clone().k_minus(bound));
            check("liberal duality", close_rel(whp(&bounded), dual, tol));

            let meet = whp(&ff.clone().min(gg.clone().min(hh.clone())));
            check("conjunctive meet", close_rel(meet, a.min(b).min(c), tol));
            let prod = whp(&ff.clone().mul(gg.clone().mul(hh.clone())));
            check("conjunctive product", close_rel(prod, times(a, times(b, c)), tol));
            let sum = whp(&ff.clone().add(gg.clone().add(hh.clone())));
            check("disjunctive sum", close_rel(sum, a + (b + c), tol));
        }
    }
    failures
}

pub const INSTANCES: usize = 200;
pub const HYPER_INSTANCES: usize = 100;

const LOGICS: [Logic; 4] = [Logic::Hl, Logic::Lisbon, Logic::Pil, Logic::Il];

fn predicate(rng: &mut super::Rand, space: &StateSpace) -> StatePredicate {
    match rng.gen_range(0..8) {
        0 => Expr::Bool(true).into(),
        1 => Expr::Bool(false).into(),
        _ => super::bool_expr(rng, space).into(),
    }
}

fn with_loop(rng: &mut super::Rand, space: &StateSpace, p: Program) -> Program {
    let body = Program::choice(
        Program::assign("x", super::int_expr(rng, space)),
        Program::assign("y", super::int_expr(rng, space)),
    );
    Program::seq(p, Program::while_loop(super::bool_expr(rng, space), body))
}

/// `reach[σ][τ]`: path oracle for loop-free programs, rule-based sp otherwise.
fn reach(eng: &Engine<Boolean>, p: &Program) -> Vec<Vec<bool>> {
    (0..eng.space.size())
        .map(|s| {
            let point = Quantity::point(&Boolean, &eng.space, s);
            let q = if p.has_loops() { eng.sp(p, &point) } else { eng.oracle().sp(p, &point) };
            q.unwrap().values
        })
        .collect()
}

/// The four logics read off reachability directly.
fn by_definition(logic: Logic, p: &[bool], q: &[bool], r: &[Vec<bool>]) -> bool {
    let n = p.len();
    match logic {
        Logic::Hl => (0..n).filter(|&s| p[s]).all(|s| (0..n).all(|t| !r[s][t] || q[t])),
        Logic::Lisbon => (0..n).filter(|&s| p[s]).all(|s| (0..n).any(|t| r[s][t] && q[t])),
        Logic::Pil => (0..n).filter(|&t| q[t]).all(|t| (0..n).all(|s| !r[s][t] || p[s])),
        Logic::Il => (0..n).filter(|&t| q[t]).all(|t| (0..n).any(|s| p[s] && r[s][t])),
    }
}

/// The right-hand side of the falsification biconditional, through the
/// checker on singleton triples of the dual logic.
fn via_singletons(eng: &Engine<Boolean>, t: &Triple, p: &[bool], q: &[bool]) -> bool {
    let space = &eng.space;
    let n = p.len();
    let check = |logic, pre: StatePredicate, post: StatePredicate| {
        eng.check_triple(&Triple::new(logic, pre, t.program.clone(), post)).unwrap().holds
    };
    let single = |i| StatePredicate::States(vec![i]);
    match t.logic {
        Logic::Hl => (0..n).filter(|&s| p[s]).all(|s| !check(Logic::Lisbon, single(s), t.post.negate(space))),
        Logic::Lisbon => (0..n).filter(|&s| p[s]).all(|s| !check(Logic::Hl, single(s), t.post.negate(space))),
        Logic::Pil => (0..n).filter(|&x| q[x]).all(|x| !check(Logic::Il, t.pre.negate(space), single(x))),
        Logic::Il => (0..n).filter(|&x| q[x]).all(|x| !check(Logic::Pil, t.pre.negate(space), single(x))),
    }
}

/// Failures of the checker, biconditionals and disprover on seeded instances.
pub fn triple_suite(seed: u64) -> Vec<String> {
    let mut rng = super::rng(seed);
    let mut failures = Vec::new();
    for i in 0..INSTANCES {
        let space = super::space(&mut rng);
        let mut program = super::program(&Boolean, &mut rng, &space);
        if rng.gen_bool(0.3) {
            program = with_loop(&mut rng, &space, program);
        }
        let pre = predicate(&mut rng, &space);
        let post = predicate(&mut rng, &space);
        let eng = Engine::new(Boolean, space);
        let ev = eng.evaluator();
        let (p, q) = (pre.mask(&ev).unwrap(), post.mask(&ev).unwrap());
        let r = reach(&eng, &program);
        for logic in LOGICS {
            let t = Triple::new(logic, pre.clone(), program.clone(), post.clone());
            let holds = eng.check_triple(&t).unwrap().holds;
            let mut fail = |what: &str| failures.push(format!("#{i} {what}: {t}"));
            if holds != by_definition(logic, &p, &q, &r) {
                fail("definition");
            }
            if holds != via_singletons(&eng, &t, &p, &q) {
                fail("singleton duals");
            }
            let d = eng.disprove_triple(&t).unwrap();
            if d.disproved == holds || (d.disproved && !d.dual_verified) {
                fail("corollary");
            }
            if let Some(w) = d.witness {
                let inside = match logic {
                    Logic::Hl | Logic::Lisbon => w.initial.is_some_and(|s| p[s]),
                    Logic::Pil | Logic::Il => w.final_.is_some_and(|t| q[t]),
                };
                if !inside {
                    fail("witness");
                }
            }
        }
    }
    failures
}

/// Returns the `σ(x), σ(y)` of the reported witness.
pub fn backward_assignment_witness() -> (bool, Option<(i64, i64)>) {
    let eng = Engine::new(Boolean, StateSpace::new(["x", "y"], 43).unwrap());
    let t = Triple::new(
        Logic::Il,
        Expr::var("y").eq(Expr::int(42)),
        Program::assign("x", Expr::int(42)),
        Expr::var("y").eq(Expr::var("x")),
    );
    let v = eng.check_triple(&t).unwrap();
    let d = eng.disprove_triple(&t).unwrap();
    let w = v.witness.and_then(|w| w.final_).map(|t| (eng.space.value(t, 0), eng.space.value(t, 1)));
    (!v.holds && d.disproved && d.dual_verified && d.witness.and_then(|w| w.final_) == v.witness.and_then(|w| w.final_), w)
}

fn hyper_space(rng: &mut super::Rand) -> StateSpace {
    match rng.gen_range(0..3) {
        0 => StateSpace::new(["x", "y"], 2).unwrap(),
        1 => StateSpace::new(["x", "y"], 3).unwrap(),
        _ => StateSpace::new(["x", "y", "z"], 2).unwrap(),
    }
}

/// Smallest violating subset by brute force over the path oracle.
fn direct_counterexample(eng: &Engine<Boolean>, pre: &HyperPredicate, p: &Program, post: &HyperPredicate) -> Option<Vec<usize>> {
    let ev = eng.evaluator();
    let (pre, post) = (pre.compile(&ev).unwrap(), post.compile(&ev).unwrap());
    let n = eng.space.size();
    for bits in 0u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|i| bits >> i & 1 == 1).collect();
        if !pre.holds(&eng.space, &set) {
            continue;
        }
        let mask: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
        let out = eng.oracle().sp(p, &Quantity::new(mask)).unwrap().support(&Boolean);
        if !post.holds(&eng.space, &out) {
            return Some(set);
        }
    }
    None
}

pub fn hyper_suite(seed: u64) -> Vec<String> {
    let mut rng = super::rng(seed);
    let mut failures = Vec::new();
    for i in 0..HYPER_INSTANCES {
        let space = hyper_space(&mut rng);
        let program = super::program(&Boolean, &mut rng, &space);
        let pre = super::hyper_predicate(&mut rng, &space, 2);
        let post = super::hyper_predicate(&mut rng, &space, 2);
        let eng = Engine::new(Boolean, space);
        let direct = direct_counterexample(&eng, &pre, &program, &post);
        let exhaustive = eng.check_hyper_triple(&pre, &program, &post, Strategy::Exhaustive).unwrap();
        let search = eng.check_hyper_triple(&pre, &program, &post, Strategy::Search).unwrap();
        let mut fail = |what: &str| failures.push(format!("#{i} {what}: {pre} / {program} / {post}"));
        match (&direct, &exhaustive) {
            (None, HyperVerdict::Proved { .. }) => {}
            (Some(_), HyperVerdict::Disproved { pre_set, .. }) => {
                if !eng.check_counterexample(&pre, &program, &post, pre_set).unwrap() {
                    fail("exhaustive witness");
                }
            }
            _ => fail("exhaustive verdict"),
        }
        match &search {
            HyperVerdict::Disproved { pre_set, .. } => {
                if direct.is_none() || !eng.check_counterexample(&pre, &program, &post, pre_set).unwrap() {
                    fail("search witness");
                }
            }
            HyperVerdict::NoCounterexampleFound { .. } => {
                // The empty set, singletons and pairs are always tried.
                if direct.as_ref().is_some_and(|s| s.len() <= 2) {
                    fail("search missed a small witness");
                }
            }
            HyperVerdict::Proved { .. } => fail("search claims a proof"),
        }
    }
    failures
}

