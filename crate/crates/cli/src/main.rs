use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, ValueEnum};
use serde_json::{json, Map, Value};
use whp_core::logic::{HyperVerdict, Strategy, Triple};
use whp_core::query::{parse_query, resolve_states, Query};
use whp_core::{
    check_well_defined, Boolean, Engine, Error, FixpointConfig, FixpointStats, Lang, MaxMin, Prob, Program, Quantity,
    Semiring, StateSpace, StatePredicate, Tropical,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Sp,
    Wp,
    Whp,
    WhpLinear,
    Check,
    Disprove,
    Termination,
    HyperCheck,
    Matrix,
    /// `hyper-check` with the exhaustive strategy
    Exhaustive,
    /// `hyper-check` with the search strategy
    Search,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Sp => "sp",
            Mode::Wp => "wp",
            Mode::Whp => "whp",
            Mode::WhpLinear => "whp-linear",
            Mode::Check => "check",
            Mode::Disprove => "disprove",
            Mode::Termination => "termination",
            Mode::HyperCheck | Mode::Exhaustive | Mode::Search => "hyper-check",
            Mode::Matrix => "matrix",
        }
    }

    fn is_logic(self) -> bool {
        matches!(self, Mode::Check | Mode::Disprove | Mode::Termination | Mode::HyperCheck | Mode::Exhaustive | Mode::Search)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
enum SemiringArg {
    Bool,
    Prob,
    Tropical,
    MaxMin,
    Lang(usize),
}

fn parse_semiring(s: &str) -> Result<SemiringArg, String> {
    let lang_len = |k: &str| k.parse::<usize>().map_err(|_| format!("bad word length `{k}`"));
    Ok(match s {
        "bool" | "boolean" => SemiringArg::Bool,
        "prob" => SemiringArg::Prob,
        "tropical" => SemiringArg::Tropical,
        "maxmin" => SemiringArg::MaxMin,
        _ => {
            if let Some(k) = s.strip_prefix("lang:") {
                SemiringArg::Lang(lang_len(k)?)
            } else if let Some(k) = s.strip_prefix("lang(").and_then(|r| r.strip_suffix(')')) {
                SemiringArg::Lang(lang_len(k)?)
            } else {
                return Err(format!("unknown semiring `{s}`; expected bool, prob, tropical, maxmin or lang:K"));
            }
        }
    })
}

/// Analyse a weighted program.
#[derive(Debug, Parser)]
#[command(name = "whp", version)]
struct Args {
    /// Program file
    program: PathBuf,
    /// Query file
    query: Option<PathBuf>,
    /// bool, prob, tropical, maxmin or lang:K
    #[arg(long, value_parser = parse_semiring)]
    semiring: Option<SemiringArg>,
    /// Variable domain size D, overriding the program header
    #[arg(long)]
    domain: Option<i64>,
    /// Fixpoint convergence threshold
    #[arg(long, default_value_t = 1e-12)]
    tolerance: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    #[arg(long, value_enum, default_value_t = Mode::Sp)]
    mode: Mode,
    /// Strategy for hyper-check
    #[arg(long, value_enum, default_value_t = StrategyArg::Search)]
    strategy: StrategyArg,
    /// Cross-check sp/wp/whp against path enumeration
    #[arg(long)]
    oracle: bool,
    /// Loop unrolling bound for --oracle
    #[arg(long, default_value_t = whp_core::oracle::DEFAULT_UNROLL)]
    unroll: usize,
    /// Exit with status 2 when the checked property fails
    #[arg(long)]
    assert: bool,
    #[arg(long, value_enum, default_value_t = Output::Text)]
    output: Output,
}

const DEFAULT_DOMAIN: i64 = 4;

struct Report {
    json: Value,
    text: String,
    failed: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(r) => {
            match args.output {
                Output::Json => println!("{}", serde_json::to_string_pretty(&r.json).expect("json")),
                Output::Text => print!("{}", r.text),
            }
            if args.assert && r.failed {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn located(path: &std::path::Path, e: Error) -> anyhow::Error {
    match e {
        Error::Parse(p) => anyhow!("{}:{}:{}: {}", path.display(), p.line, p.column, p.message),
        e => anyhow!("{}: {e}", path.display()),
    }
}

fn run(args: &Args) -> anyhow::Result<Report> {
    let src = std::fs::read_to_string(&args.program).with_context(|| format!("reading {}", args.program.display()))?;
    let file = whp_core::syntax::parse_program(&src).map_err(|e| located(&args.program, e.into()))?;
    let query = match &args.query {
        Some(path) => {
            let q = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_query(&q).map_err(|e| located(path, e))?
        }
        None => Query::default(),
    };
    let space = file.space(args.domain, DEFAULT_DOMAIN)?;
    let program = file.program();
    let config = FixpointConfig { max_iters: args.max_iters, epsilon: args.tolerance };
    let semiring = match (&args.semiring, args.mode.is_logic()) {
        (None, true) => SemiringArg::Bool,
        (Some(s), true) if *s != SemiringArg::Bool => bail!("mode {} works over the bool semiring", args.mode.name()),
        (None, false) => SemiringArg::Prob,
        (Some(s), _) => s.clone(),
    };
    let ctx = Ctx { args, query: &query, program: &program };
    match semiring {
        SemiringArg::Bool => ctx.run(Boolean, space, config),
        SemiringArg::Prob => ctx.run(Prob::default(), space, config),
        SemiringArg::Tropical => ctx.run(Tropical, space, config),
        SemiringArg::MaxMin => ctx.run(MaxMin, space, config),
        SemiringArg::Lang(k) => ctx.run(Lang::new(k), space, config),
    }
}

struct Ctx<'a> {
    args: &'a Args,
    query: &'a Query,
    program: &'a Program,
}

/// Rounds to 12 significant digits; infinities become strings.
fn num(v: f64) -> Value {
    if v.is_nan() {
        return json!("nan");
    }
    if v.is_infinite() {
        return json!(if v > 0.0 { "inf" } else { "-inf" });
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("float");
    if rounded == rounded.trunc() && rounded.abs() < 1e15 {
        json!(rounded as i64)
    } else {
        json!(rounded)
    }
}

fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return whp_core::semiring::render_real(v);
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("float");
    rounded.to_string()
}

fn indent(s: &str) -> String {
    s.replace('\n', "\n  ")
}

fn state_json(space: &StateSpace, id: usize) -> Value {
    let mut m = Map::new();
    for (i, v) in space.vars().iter().enumerate() {
        m.insert(v.clone(), json!(space.value(id, i)));
    }
    Value::Object(m)
}

fn value_json<S: Semiring>(s: &S, v: &S::Value) -> Value {
    if s.name() == "bool" {
        return json!(!s.is_zero(v));
    }
    match s.to_real(v) {
        Some(r) => num(r),
        None => json!(s.render(v)),
    }
}

fn quantity_json<S: Semiring>(s: &S, space: &StateSpace, q: &Quantity<S::Value>) -> Value {
    let rows: Vec<Value> =
        q.support(s).into_iter().map(|i| json!({"state": state_json(space, i), "value": value_json(s, &q[i])})).collect();
    json!(rows)
}

fn stats_json(st: &FixpointStats) -> Value {
    json!({
        "loops": st.loops,
        "iterations": st.iterations,
        "max_iterations": st.max_iterations,
        "truncation_bound": st.truncation_bound.map(num),
    })
}

fn stats_text(st: &FixpointStats) -> String {
    let bound = st.truncation_bound.map(fmt_num).unwrap_or_else(|| "none".into());
    format!("fixpoint: {} loops, {} iterations (max {}), truncation bound {}\n", st.loops, st.iterations, st.max_iterations, bound)
}

fn merge(total: &mut FixpointStats, st: &FixpointStats) {
    total.loops += st.loops;
    total.iterations += st.iterations;
    total.max_iterations = total.max_iterations.max(st.max_iterations);
    total.truncation_bound = match (total.truncation_bound, st.truncation_bound) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    };
}

fn witness_json(space: &StateSpace, w: &Option<whp_core::Witness>) -> Value {
    match w {
        None => Value::Null,
        Some(w) => json!({
            "initial": w.initial.map(|i| state_json(space, i)),
            "final": w.final_.map(|i| state_json(space, i)),
        }),
    }
}

fn witness_text(space: &StateSpace, w: &Option<whp_core::Witness>) -> String {
    let Some(w) = w else { return String::new() };
    let mut parts = Vec::new();
    if let Some(i) = w.initial {
        parts.push(format!("initial {}", space.show(i)));
    }
    if let Some(i) = w.final_ {
        parts.push(format!("final {}", space.show(i)));
    }
    format!("  witness: {}\n", parts.join(", "))
}

fn states_json(space: &StateSpace, ids: &[usize]) -> Value {
    json!(ids.iter().map(|&i| state_json(space, i)).collect::<Vec<_>>())
}

fn states_text(space: &StateSpace, ids: &[usize]) -> String {
    let shown: Vec<String> = ids.iter().map(|&i| space.show(i)).collect();
    format!("{{{}}}", shown.join(", "))
}

impl Ctx<'_> {
    fn run<S: Semiring>(&self, s: S, space: StateSpace, config: FixpointConfig) -> anyhow::Result<Report> {
        check_well_defined(self.program, &s, &space)?;
        let engine = Engine::new(s, space).with_config(config);
        let mut header = Map::new();
        header.insert("mode".into(), json!(self.args.mode.name()));
        header.insert("semiring".into(), json!(engine.semiring.name()));
        header.insert("vars".into(), json!(engine.space.vars()));
        header.insert("domain".into(), json!(engine.space.domain()));
        header.insert("states".into(), json!(engine.space.size()));
        let mut text = format!(
            "mode {} over {}, vars [{}], domain {}, {} states\n",
            self.args.mode.name(),
            engine.semiring.name(),
            engine.space.vars().join(", "),
            engine.space.domain(),
            engine.space.size()
        );
        let (body, body_text, failed) = match self.args.mode {
            Mode::Sp => self.sp(&engine)?,
            Mode::Wp => self.wp(&engine)?,
            Mode::Whp => self.whp(&engine)?,
            Mode::WhpLinear => self.whp_linear(&engine)?,
            Mode::Matrix => self.matrix(&engine)?,
            Mode::Check | Mode::Disprove | Mode::Termination | Mode::HyperCheck | Mode::Exhaustive | Mode::Search => {
                let bool_engine = Engine::new(Boolean, engine.space.clone()).with_config(engine.config);
                self.logic(&bool_engine)?
            }
        };
        if let Value::Object(m) = body {
            header.extend(m);
        }
        text.push_str(&body_text);
        Ok(Report { json: Value::Object(header), text, failed })
    }

    fn inits<S: Semiring>(&self, engine: &Engine<S>) -> anyhow::Result<Vec<(String, Quantity<S::Value>)>> {
        if self.query.inits.is_empty() {
            bail!("the query needs at least one `init:` directive");
        }
        self.query.inits.iter().map(|q| Ok((q.to_string(), q.eval(engine)?))).collect()
    }

    fn sp<S: Semiring>(&self, engine: &Engine<S>) -> anyhow::Result<(Value, String, bool)> {
        let s = &engine.semiring;
        let mut rows = Vec::new();
        let mut text = String::new();
        let mut total = FixpointStats::exact();
        for (name, mu) in self.inits(engine)? {
            let (out, st) = engine.sp_stats(self.program, &mu)?;
            merge(&mut total, &st);
            text.push_str(&format!("sp from {name}:\n  {}\n", indent(&out.render(s, &engine.space))));
            let mut row = json!({"init": name, "result": quantity_json(s, &engine.space, &out)});
            if self.args.oracle {
                let o = engine.oracle().unroll(self.args.unroll).sp_full(self.program, &mu)?;
                let d = out.distance(s, &o.quantity);
                text.push_str(&format!(
                    "  oracle:\n  {}\n  ({} paths, remainder {}, distance {})\n",
                    indent(&o.quantity.render(s, &engine.space)),
                    o.paths,
                    s.render(&o.remainder),
                    fmt_num(d)
                ));
                row["oracle"] = json!({
                    "result": quantity_json(s, &engine.space, &o.quantity),
                    "paths": o.paths,
                    "remainder": value_json(s, &o.remainder),
                    "distance": num(d),
                });
            }
            rows.push(row);
        }
        text.push_str(&stats_text(&total));
        Ok((json!({"results": rows, "fixpoint": stats_json(&total)}), text, false))
    }

    fn wp<S: Semiring>(&self, engine: &Engine<S>) -> anyhow::Result<(Value, String, bool)> {
        let s = &engine.semiring;
        let post = self.query.post.as_ref().ok_or_else(|| anyhow!("the query needs a `post:` directive"))?;
        let f = post.eval(engine)?;
        let (out, st) = engine.wp_stats(self.program, &f)?;
        let mut text = format!("wp of {post}:\n  {}\n", indent(&out.render(s, &engine.space)));
        let mut body = json!({"post": post.to_string(), "result": quantity_json(s, &engine.space, &out)});
        if self.args.oracle {
            let o = engine.oracle().unroll(self.args.unroll).wp(self.program, &f)?;
            let d = out.distance(s, &o);
            text.push_str(&format!("  oracle:\n  {}\n  (distance {})\n", indent(&o.render(s, &engine.space)), fmt_num(d)));
            body["oracle"] = json!({"result": quantity_json(s, &engine.space, &o), "distance": num(d)});
        }
        text.push_str(&stats_text(&st));
        body["fixpoint"] = stats_json(&st);
        Ok((body, text, false))
    }

    fn whp<S: Semiring>(&self, engine: &Engine<S>) -> anyhow::Result<(Value, String, bool)> {
        let ff = self.query.hyper.as_ref().ok_or_else(|| anyhow!("the query needs a `hyper:` directive"))?;
        let whp = engine.whp(self.program, ff);
        let mut rows = Vec::new();
        let mut text = format!("whp of {ff}:\n");
        let mut total = FixpointStats::exact();
        let mut eval = |label: Value, shown: String, f: &Quantity<S::Value>, text: &mut String| -> anyhow::Result<Value> {
            let (v, st) = whp.eval_stats(f)?;
            merge(&mut total, &st);
            text.push_str(&format!("  at {shown}: {}\n", fmt_num(v)));
            let mut row = json!({"at": label, "value": num(v)});
            if self.args.oracle {
                let o = engine.oracle().unroll(self.args.unroll).sp_full(self.program, f)?;
                let ov = engine.eval_signed(ff, &o.quantity)?;
                text.push_str(&format!("    oracle: {} ({} paths, difference {})\n", fmt_num(ov), o.paths, fmt_num((v - ov).abs())));
                row["oracle"] = json!({"value": num(ov), "paths": o.paths, "remainder": value_json(&engine.semiring, &o.remainder)});
            }
            Ok(row)
        };
        if self.query.points {
            for id in 0..engine.space.size() {
                let f = Quantity::point(&engine.semiring, &engine.space, id);
                rows.push(eval(state_json(&engine.space, id), engine.space.show(id), &f, &mut text)?);
            }
        } else {
            for (name, f) in self.inits(engine)? {
                rows.push(eval(json!(name), name.clone(), &f, &mut text)?);
            }
        }
        text.push_str(&stats_text(&total));
        Ok((json!({"hyper": ff.to_string(), "results": rows, "fixpoint": stats_json(&total)}), text, false))
    }

    fn whp_linear<S: Semiring>(&self, engine: &Engine<S>) -> anyhow::Result<(Value, String, bool)> {
        const SHOWN: usize = 400;
        let ff = self.query.hyper.as_ref().ok_or_else(|| anyhow!("the query needs a `hyper:` directive"))?;
        let out = engine.whp_linear(self.program, ff)?;
        let shown = out.to_string();
        let size = shown.chars().count();
        let mut text = format!("whp-linear of {ff}:\n");
        if size <= SHOWN {
            text.push_str(&format!("  = {shown}\n"));
        } else {
            text.push_str(&format!("  = <{size} characters>\n"));
        }
        let mut rows = Vec::new();
        for (name, f) in self.inits(engine)? {
            let v = engine.eval_signed(&out, &f)?;
            let semantic = engine.whp(self.program, ff).eval_signed(&f)?;
            text.push_str(&format!("  at {name}: {} (semantic {})\n", fmt_num(v), fmt_num(semantic)));
            rows.push(json!({"at": name, "value": num(v), "semantic": num(semantic)}));
        }
        let body = json!({
            "hyper": ff.to_string(),
            "transformed": if size <= SHOWN { json!(shown) } else { Value::Null },
            "transformed_size": size,
            "results": rows,
        });
        Ok((body, text, false))
    }

    fn matrix<S: Semiring>(&self, engine: &Engine<S>) -> anyhow::Result<(Value, String, bool)> {
        let s = &engine.semiring;
        let (m, st) = engine.denote_stats(self.program)?;
        let n = engine.space.size();
        let mut rows = Vec::new();
        let mut text = String::from("nonzero entries:\n");
        for from in 0..n {
            for to in 0..n {
                let w = m.get(from, to);
                if s.is_zero(w) {
                    continue;
                }
                text.push_str(&format!("  {} -> {}: {}\n", engine.space.show(from), engine.space.show(to), s.render(w)));
                rows.push(json!({"from": state_json(&engine.space, from), "to": state_json(&engine.space, to), "weight": value_json(s, w)}));
            }
        }
        text.push_str(&stats_text(&st));
        Ok((json!({"entries": rows, "fixpoint": stats_json(&st)}), text, false))
    }

    fn logic(&self, engine: &Engine<Boolean>) -> anyhow::Result<(Value, String, bool)> {
        let space = &engine.space;
        match self.args.mode {
            Mode::Check | Mode::Disprove => {
                let tq = self.query.triple.as_ref().ok_or_else(|| anyhow!("the query needs a `triple:` directive"))?;
                let t = Triple::new(tq.logic, tq.pre.clone(), self.program.clone(), tq.post.clone());
                if self.args.mode == Mode::Check {
                    let v = engine.check_triple(&t)?;
                    let text = format!("{t}\n  {}\n{}", if v.holds { "holds" } else { "fails" }, witness_text(space, &v.witness));
                    let body = json!({"triple": t.to_string(), "holds": v.holds, "witness": witness_json(space, &v.witness)});
                    Ok((body, text, !v.holds))
                } else {
                    let d = engine.disprove_triple(&t)?;
                    let mut text = format!("{t}\n  {}\n{}", if d.disproved { "disproved" } else { "not disproved" }, witness_text(space, &d.witness));
                    if let Some(dual) = &d.dual {
                        text.push_str(&format!("  refuted by {dual}: {}\n", if d.dual_verified { "verified" } else { "NOT verified" }));
                    }
                    let body = json!({
                        "triple": t.to_string(),
                        "disproved": d.disproved,
                        "witness": witness_json(space, &d.witness),
                        "dual": d.dual.as_ref().map(|t| t.to_string()),
                        "dual_verified": d.dual_verified,
                    });
                    Ok((body, text, d.disproved))
                }
            }
            Mode::Termination => {
                let pre: StatePredicate = self.query.pre.clone().unwrap_or(whp_core::Expr::Bool(true)).into();
                let target: StatePredicate = self.query.target.clone().unwrap_or(whp_core::Expr::Bool(true)).into();
                let rows = engine.termination_report(self.program, &pre, &target)?;
                let mut text = format!("P = {pre}, Q = {target}\n");
                let mut out = Vec::new();
                for r in &rows {
                    text.push_str(&format!("  {:<28} {:<26} {}\n", r.property, r.triple, if r.verdict.holds { "yes" } else { "no" }));
                    text.push_str(&witness_text(space, &r.verdict.witness).replace("  witness", "    witness"));
                    out.push(json!({
                        "property": r.property,
                        "triple": r.triple,
                        "holds": r.verdict.holds,
                        "witness": witness_json(space, &r.verdict.witness),
                    }));
                }
                Ok((json!({"pre": pre.to_string(), "target": target.to_string(), "rows": out}), text, false))
            }
            _ => {
                let strategy = match (self.args.mode, self.args.strategy) {
                    (Mode::Exhaustive, _) | (Mode::HyperCheck, StrategyArg::Exhaustive) => Strategy::Exhaustive,
                    _ => Strategy::Search,
                };
                let pre = self.query.hyper_pre.as_ref().ok_or_else(|| anyhow!("the query needs a `hyper_pre:` directive"))?;
                let post = self.query.hyper_post.as_ref().ok_or_else(|| anyhow!("the query needs a `hyper_post:` directive"))?;
                let mut text = format!("hyper triple {{ {pre} }} C {{ {post} }}, strategy {}\n", strategy_name(strategy));
                let mut body = json!({"hyper_pre": pre.to_string(), "hyper_post": post.to_string(), "strategy": strategy_name(strategy)});
                let mut failed = false;
                if let Some(states) = &self.query.candidate {
                    let ids = resolve_states(engine, states)?;
                    let cex = engine.check_counterexample(pre, self.program, post, &ids)?;
                    failed |= cex;
                    text.push_str(&format!(
                        "  candidate {}: {}\n",
                        states_text(space, &ids),
                        if cex { "is a counterexample" } else { "is not a counterexample" }
                    ));
                    body["candidate"] = json!({"states": states_json(space, &ids), "counterexample": cex});
                }
                let verdict = engine.check_hyper_triple(pre, self.program, post, strategy)?;
                match &verdict {
                    HyperVerdict::Proved { checked } => {
                        text.push_str(&format!("  proved ({checked} sets checked)\n"));
                        body["verdict"] = json!("proved");
                        body["checked"] = json!(checked);
                    }
                    HyperVerdict::NoCounterexampleFound { checked } => {
                        text.push_str(&format!("  no counterexample found ({checked} sets checked)\n"));
                        body["verdict"] = json!("no counterexample found");
                        body["checked"] = json!(checked);
                    }
                    HyperVerdict::Disproved { pre_set, post_set } => {
                        failed = true;
                        text.push_str(&format!("  disproved by {}\n  reaching {}\n", states_text(space, pre_set), states_text(space, post_set)));
                        body["verdict"] = json!("disproved");
                        body["pre_set"] = states_json(space, pre_set);
                        body["post_set"] = states_json(space, post_set);
                    }
                }
                Ok((body, text, failed))
            }
        }
    }
}

fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::Exhaustive => "exhaustive",
        Strategy::Search => "search",
    }
}
