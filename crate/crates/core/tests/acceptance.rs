//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Tolerances are pinned below.

mod common;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::suites::{backward_assignment_witness, differential, healthiness, hyper_suite, triple_suite};
use whp_core::syntax::parse_program;
use whp_core::{
    parse_query, Boolean, Engine, Expr, HyperVerdict, Hyperquantity, Lang, MaxMin, Prob, Program, Quantity,
    StatePredicate, StateSpace, Strategy, Tropical,
};

const VARIANCE_TOL: f64 = 1e-6;
const VARIANCE_TIME: Duration = Duration::from_secs(1);
const COIN_TOL: f64 = 1e-9;
const DIFFERENTIAL_TIME: Duration = Duration::from_secs(60);

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "corpus", name].iter().collect();
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn load(name: &str) -> (Program, StateSpace) {
    let file = parse_program(&corpus(name)).unwrap();
    (file.program(), file.space(None, 4).unwrap())
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Geometric flip count from x = 1: Var[x] = 2.
fn variance() -> Outcome {
    let (p, space) = load("variance.wrcl");
    let start = Instant::now();
    let eng = Engine::new(Prob::default(), space);
    let mu = Quantity::point(&eng.semiring, &eng.space, eng.space.id_of([("x", 1)]).unwrap());
    let ff = Hyperquantity::Var(Expr::var("x"));
    let (v, stats) = eng.whp(&p, &ff).eval_stats(&mu).unwrap();
    let elapsed = start.elapsed();
    let bound = stats.truncation_bound.unwrap_or(f64::NAN);
    outcome(
        (v - 2.0).abs() < VARIANCE_TOL && elapsed < VARIANCE_TIME,
        format!("Var[x] = {v:.12}, {} iterations, tail mass {bound:.1e}, {elapsed:.2?}", stats.max_iterations),
    )
}

/// Expected return over n coins, one of them fair: (n - 3) / n.
fn coin() -> Outcome {
    let (p, space) = load("coin.wrcl");
    let eng = Engine::new(Prob::default(), space);
    let ff = Hyperquantity::Expect(Expr::int(6).mul(Expr::var("w")).sub(Expr::int(5)));
    let c0 = eng.space.id_of([("c", 0), ("w", 0)]).unwrap();
    let c1 = eng.space.id_of([("c", 1), ("w", 0)]).unwrap();
    let mut values = Vec::new();
    let mut pass = true;
    for n in 1..=6 {
        let nf = n as f64;
        let mut mu = Quantity::zero(&eng.semiring, &eng.space);
        mu.values[c0] = (nf - 1.0) / nf;
        mu.values[c1] = 1.0 / nf;
        let v = eng.whp(&p, &ff).eval_signed(&mu).unwrap();
        pass &= (v - (nf - 3.0) / nf).abs() < COIN_TOL;
        values.push(v);
    }
    let first = values.iter().position(|&v| v >= -COIN_TOL).map(|i| i + 1);
    pass &= first == Some(3) && values[1] < -COIN_TOL;
    let shown: Vec<String> = values.iter().map(|v| format!("{v:.3}")).collect();
    outcome(pass, format!("returns [{}], first nonnegative at n = {first:?}", shown.join(", ")))
}

/// Largest initial h by brute force over the two-branch program.
fn qif_by_enumeration(d: i64, observed: i64) -> Option<i64> {
    (0..d).flat_map(|h| (0..d).map(move |_l| h)).filter(|&h| (if h > 7 { 99 } else { 80 }) == observed).max()
}

fn qif() -> Outcome {
    let (p, space) = load("qif.wrcl");
    let d = space.domain();
    let eng = Engine::new(MaxMin, space);
    let uniform = Quantity::one(&MaxMin, &eng.space);
    let sup = |l: i64| {
        let ff = Hyperquantity::SupSupport(Expr::var("h")).observe(Expr::var("l").eq(Expr::int(l)));
        eng.whp(&p, &ff).eval_signed(&uniform).unwrap()
    };
    let (at80, at99) = (sup(80), sup(99));
    let expected99 = qif_by_enumeration(d, 99).unwrap() as f64;
    outcome(
        d == 128 && at80 == 7.0 && at99 == expected99 && expected99 == (d - 1) as f64,
        format!("D = {d}, sup[h | l == 80] = {at80}, sup[h | l == 99] = {at99} (enumeration: {expected99})"),
    )
}

fn language() -> Outcome {
    let (p, space) = load("lang_example.wrcl");
    let lang = Lang::new(4);
    let eng = Engine::new(lang, space);
    let mu = Quantity::constant(&eng.space, lang.words(["a"]));
    let g = Quantity::constant(&eng.space, lang.words(["b"]));
    let forward = eng.sp(&p, &mu).unwrap().dot(&lang, &g).unwrap();
    let backward = mu.dot(&lang, &eng.wp(&p, &g).unwrap()).unwrap();
    let expected = lang.words(["aab", "abb"]);
    outcome(forward == expected && backward == expected, format!("sp side {forward}, wp side {backward}"))
}

fn hyper_replays() -> Outcome {
    let check = |name: &str, strategy| {
        let (p, space) = load(&format!("{name}.wrcl"));
        let q = parse_query(&corpus(&format!("{name}.q"))).unwrap();
        let eng = Engine::new(Boolean, space);
        let verdict = eng.check_hyper_triple(q.hyper_pre.as_ref().unwrap(), &p, q.hyper_post.as_ref().unwrap(), strategy).unwrap();
        (eng, p, q, verdict)
    };
    let mut notes = Vec::new();
    let mut pass = true;

    for name in ["ni_prove", "gni_prove"] {
        let (eng, _, _, v) = check(name, Strategy::Exhaustive);
        let ok = matches!(v, HyperVerdict::Proved { .. }) && eng.space.domain() <= 4;
        pass &= ok;
        notes.push(format!("{name} {}", if ok { "proved" } else { "NOT proved" }));
    }

    let (eng, _, _, v) = check("ni_disprove", Strategy::Search);
    let shape = match &v {
        HyperVerdict::Disproved { pre_set, .. } if pre_set.len() == 2 => {
            let (l, h) = (eng.space.require("l").unwrap(), eng.space.require("h").unwrap());
            let (a, b) = (pre_set[0], pre_set[1]);
            eng.space.value(a, l) == eng.space.value(b, l) && eng.space.value(a, h) != eng.space.value(b, h)
        }
        _ => false,
    };
    pass &= shape;
    notes.push(format!("ni_disprove {}", if shape { "pair with equal l, distinct h" } else { "NO pair witness" }));

    let (eng, p, q, v) = check("gni_disprove", Strategy::Search);
    let d = eng.space.domain();
    let pair = [eng.space.id_of([("l", 0), ("h", 1), ("y", 0)]).unwrap(), eng.space.id_of([("l", 0), ("h", d - 1), ("y", 0)]).unwrap()];
    let (pre, post) = (q.hyper_pre.as_ref().unwrap(), q.hyper_post.as_ref().unwrap());
    let verified = eng.check_counterexample(pre, &p, post, &pair).unwrap();
    let found = matches!(v, HyperVerdict::Disproved { .. });
    pass &= found && verified;
    notes.push(format!("gni_disprove search {}, h-pair {{1, {}}} re-verified: {verified}", if found { "disproved" } else { "failed" }, d - 1));
    outcome(pass, notes.join("; "))
}

fn differential_suites() -> Outcome {
    let start = Instant::now();
    let reports = [
        differential(Boolean, 1, true),
        differential(Prob::default(), 2, true),
        differential(Tropical, 3, true),
        differential(MaxMin, 4, true),
        differential(common::lang(), 5, false),
    ];
    let elapsed = start.elapsed();
    let checked: usize = reports.iter().map(|r| r.checked).sum();
    let failed: Vec<&String> = reports.iter().flat_map(|r| &r.failures).collect();
    for f in failed.iter().take(5) {
        eprintln!("  {f}");
    }
    outcome(failed.is_empty() && elapsed < DIFFERENTIAL_TIME, format!("{checked} programs, {} failures, {elapsed:.1?}", failed.len()))
}

fn healthiness_suite() -> Outcome {
    let failed: Vec<String> = [
        healthiness(Boolean, 11, true),
        healthiness(Prob::default(), 12, true),
        healthiness(Tropical, 13, true),
        healthiness(MaxMin, 14, true),
        healthiness(common::lang(), 15, false),
    ]
    .concat();
    for f in failed.iter().take(5) {
        eprintln!("  {f}");
    }
    outcome(failed.is_empty(), format!("5 x {} tuples, {} failures", common::suites::TUPLES, failed.len()))
}

fn logic() -> Outcome {
    let failed = [triple_suite(21), hyper_suite(22)].concat();
    for f in failed.iter().take(5) {
        eprintln!("  {f}");
    }
    let (ok, witness) = backward_assignment_witness();
    outcome(
        failed.is_empty() && ok && witness == Some((0, 0)),
        format!("{} triple instances, {} failures, backward assignment witness x, y = {witness:?}", common::suites::INSTANCES, failed.len()),
    )
}

/// Expected rows, in report order: must-nontermination, may-termination,
/// unreachability, reachability, then their existential negations.
/// Space: one variable x with values 0, 1, 2.
///
/// - `diverge`: nothing terminates, nothing is reachable.
/// - `skip`: everything terminates, every state is reachable.
/// - `while x == 1 { skip }`: x = 1 loops forever, 0 and 2 exit at once,
///   so reachable = {0, 2} and Q = {x == 1} is unreachable.
/// - `if x > 5 { x := 1 } else { x := 0 }`: the first branch is dead, so
///   only 0 is reachable and Q = {x == 1} is not.
/// - `x := 2` from P = {x == 0}: terminates, Q = {x < 2} is unreachable.
/// - `x := 1 [] diverge` from P = {x == 2}: may terminate, Q = {x == 1} is
///   reachable.
const TERMINATION: [(&str, &str, &str, [bool; 8]); 6] = [
    ("diverge", "true", "x == 0", [true, false, true, false, false, true, false, true]),
    ("skip", "true", "x == 0", [false, true, false, true, true, false, true, false]),
    ("while x == 1 { skip }", "true", "x == 1", [false, false, true, false, true, true, false, true]),
    ("if x > 5 { x := 1 } else { x := 0 }", "true", "x == 1", [false, true, true, false, true, false, false, true]),
    ("x := 2", "x == 0", "x < 2", [false, true, true, false, true, false, false, true]),
    ("x := 1 [] diverge", "x == 2", "x == 1", [false, true, false, true, true, false, true, false]),
];

fn termination() -> Outcome {
    let eng = Engine::new(Boolean, StateSpace::new(["x"], 3).unwrap());
    let mut wrong = Vec::new();
    for (src, pre, post, expected) in TERMINATION {
        let p = whp_core::elaborate(&whp_core::syntax::parse_stmt(src).unwrap());
        let pre = StatePredicate::Expr(whp_core::syntax::parse_expr(pre).unwrap());
        let post = StatePredicate::Expr(whp_core::syntax::parse_expr(post).unwrap());
        let rows = eng.termination_report(&p, &pre, &post).unwrap();
        for (row, want) in rows.iter().zip(expected) {
            if row.verdict.holds != want {
                wrong.push(format!("{src}: {}", row.property));
            }
        }
    }
    outcome(wrong.is_empty(), if wrong.is_empty() { "6 programs x 8 rows".to_string() } else { wrong.join(", ") })
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("variance of the geometric loop", variance),
        ("coin game sweep", coin),
        ("quantitative information flow", qif),
        ("language sp-wp duality", language),
        ("NI and GNI replays", hyper_replays),
        ("differential suites", differential_suites),
        ("healthiness suite", healthiness_suite),
        ("triple logic suite", logic),
        ("termination and reachability tables", termination),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        all &= o.pass;
        println!("criterion {}: {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
