//! Checking and disproving program-logic triples, termination and
//! reachability properties, and hyper triples, over the Boolean semiring.

use std::cell::RefCell;
use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hyper::{CompiledPredicate, HyperPredicate, StatePredicate};
use crate::program::Program;
use crate::quantity::Quantity;
use crate::semantics::{Engine, WeightMatrix};
use crate::semiring::Boolean;

/// Largest state space the exhaustive hyper check enumerates subsets of.
pub const EXHAUSTIVE_LIMIT: usize = 16;
/// Random subsets tried by the search strategy after the empty set,
/// singletons and pairs.
pub const RANDOM_SUBSETS: usize = 200;
pub const SEARCH_SEED: u64 = 0x5eed_cafe;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Logic {
    /// Partial correctness: from `P`, every final state is in `Q`.
    Hl,
    /// Angelic total correctness: from `P`, some final state is in `Q`.
    Lisbon,
    /// Partial incorrectness: every reachable `Q` state comes only from `P`.
    Pil,
    /// Incorrectness: every `Q` state is reachable from `P`.
    Il,
}

impl Logic {
    pub fn name(self) -> &'static str {
        match self {
            Logic::Hl => "hl",
            Logic::Lisbon => "lisbon",
            Logic::Pil => "pil",
            Logic::Il => "il",
        }
    }

    pub fn parse(s: &str) -> Option<Logic> {
        Some(match s {
            "hl" => Logic::Hl,
            "lisbon" => Logic::Lisbon,
            "pil" => Logic::Pil,
            "il" => Logic::Il,
            _ => return None,
        })
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triple {
    pub logic: Logic,
    pub pre: StatePredicate,
    pub program: Program,
    pub post: StatePredicate,
}

impl Triple {
    pub fn new(logic: Logic, pre: impl Into<StatePredicate>, program: Program, post: impl Into<StatePredicate>) -> Self {
        Triple { logic, pre: pre.into(), program, post: post.into() }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {{ pre: {} }} {} {{ post: {} }}", self.logic, self.pre, self.program, self.post)
    }
}

/// Initial and/or final state demonstrating a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Witness {
    pub initial: Option<usize>,
    pub final_: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    fn yes() -> Self {
        Verdict { holds: true, witness: None }
    }

    fn no(initial: Option<usize>, final_: Option<usize>) -> Self {
        Verdict { holds: false, witness: Some(Witness { initial, final_ }) }
    }
}

/// Outcome of disproving a triple through its existential form.
#[derive(Debug, Clone, PartialEq)]
pub struct Disproof {
    pub disproved: bool,
    pub witness: Option<Witness>,
    /// The valid triple on a singleton that refutes the original one.
    pub dual: Option<Triple>,
    /// Whether `dual` was re-checked and holds.
    pub dual_verified: bool,
}

/// One row of the termination and reachability tables.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminationRow {
    pub property: &'static str,
    pub triple: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HyperVerdict {
    Proved { checked: usize },
    Disproved { pre_set: Vec<usize>, post_set: Vec<usize> },
    NoCounterexampleFound { checked: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Exhaustive,
    Search,
}

/// Successor sets, from the matrix when it fits and builds, otherwise from
/// rule-based sp one state at a time.
struct Reach<'a> {
    engine: &'a Engine<Boolean>,
    program: &'a Program,
    matrix: Option<WeightMatrix<bool>>,
    rows: RefCell<Vec<Option<Vec<bool>>>>,
}

impl<'a> Reach<'a> {
    fn new(engine: &'a Engine<Boolean>, program: &'a Program) -> Self {
        let matrix = if engine.matrix_fits() { engine.denote(program).ok() } else { None };
        Reach { engine, program, matrix, rows: RefCell::new(vec![None; engine.space.size()]) }
    }

    /// `supp(sp⟦C⟧(ι_σ))`
    fn row(&self, sigma: usize) -> Result<Vec<bool>> {
        if let Some(m) = &self.matrix {
            return Ok(m.row(sigma).to_vec());
        }
        if let Some(r) = &self.rows.borrow()[sigma] {
            return Ok(r.clone());
        }
        let r = self.engine.sp(self.program, &Quantity::point(&Boolean, &self.engine.space, sigma))?.values;
        self.rows.borrow_mut()[sigma] = Some(r.clone());
        Ok(r)
    }

    /// `supp(sp⟦C⟧([S]))`
    fn post(&self, set: &[bool]) -> Result<Vec<bool>> {
        if self.matrix.is_none() {
            return Ok(self.engine.sp(self.program, &Quantity::new(set.to_vec()))?.values);
        }
        let mut out = vec![false; set.len()];
        for (sigma, _) in set.iter().enumerate().filter(|(_, &b)| b) {
            for (o, r) in out.iter_mut().zip(self.row(sigma)?) {
                *o |= r;
            }
        }
        Ok(out)
    }

    /// `supp(wp⟦C⟧([S]))`: states with some successor in `S`.
    fn pre(&self, set: &[bool]) -> Result<Vec<bool>> {
        match &self.matrix {
            Some(m) => Ok((0..set.len()).map(|s| m.row(s).iter().zip(set).any(|(a, b)| *a && *b)).collect()),
            None => (0..set.len()).map(|s| Ok(self.row(s)?.iter().zip(set).any(|(a, b)| *a && *b))).collect(),
        }
    }
}


fn not(mask: &[bool]) -> Vec<bool> {
    mask.iter().map(|b| !b).collect()
}

fn ids(mask: &[bool]) -> Vec<usize> {
    mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
}

impl Engine<Boolean> {
    fn masks(&self, t: &Triple) -> Result<(Vec<bool>, Vec<bool>)> {
        let ev = self.evaluator();
        Ok((t.pre.mask(&ev)?, t.post.mask(&ev)?))
    }

    /// Decides a triple by direct computation of reachable sets.
    pub fn check_triple(&self, t: &Triple) -> Result<Verdict> {
        let (p, q) = self.masks(t)?;
        let reach = Reach::new(self, &t.program);
        self.check_with(t.logic, &p, &q, &reach)
    }

    fn check_with(&self, logic: Logic, p: &[bool], q: &[bool], reach: &Reach<'_>) -> Result<Verdict> {
        Ok(match logic {
            Logic::Hl => {
                for sigma in ids(p) {
                    let r = reach.row(sigma)?;
                    if let Some(tau) = (0..r.len()).find(|&t| r[t] && !q[t]) {
                        return Ok(Verdict::no(Some(sigma), Some(tau)));
                    }
                }
                Verdict::yes()
            }
            Logic::Lisbon => {
                for sigma in ids(p) {
                    let r = reach.row(sigma)?;
                    if !r.iter().zip(q).any(|(a, b)| *a && *b) {
                        return Ok(Verdict::no(Some(sigma), None));
                    }
                }
                Verdict::yes()
            }
            Logic::Pil => {
                let bad = reach.post(&not(p))?;
                match (0..q.len()).find(|&t| q[t] && bad[t]) {
                    Some(tau) => {
                        let from = ids(&not(p)).into_iter().find(|&s| reach.row(s).map(|r| r[tau]).unwrap_or(false));
                        Verdict::no(from, Some(tau))
                    }
                    None => Verdict::yes(),
                }
            }
            Logic::Il => {
                let good = reach.post(p)?;
                match (0..q.len()).find(|&t| q[t] && !good[t]) {
                    Some(tau) => Verdict::no(None, Some(tau)),
                    None => Verdict::yes(),
                }
            }
        })
    }

    /// Searches for the existential witness refuting `t`, then re-checks
    /// the refuting triple on that witness.
    pub fn disprove_triple(&self, t: &Triple) -> Result<Disproof> {
        let (p, q) = self.masks(t)?;
        let reach = Reach::new(self, &t.program);
        let space = &self.space;
        let found: Option<(Witness, Triple)> = match t.logic {
            // P ∩ wp⟦C⟧(¬Q) ≠ ∅
            Logic::Hl => {
                let can_fail = reach.pre(&not(&q))?;
                (0..p.len()).find(|&s| p[s] && can_fail[s]).map(|s| {
                    let r = reach.row(s).unwrap_or_default();
                    let tau = (0..r.len()).find(|&x| r[x] && !q[x]);
                    let dual = Triple::new(Logic::Lisbon, StatePredicate::States(vec![s]), t.program.clone(), t.post.negate(space));
                    (Witness { initial: Some(s), final_: tau }, dual)
                })
            }
            // ∃σ ∈ P. {{σ}} ⊆ whp⟦C⟧(□¬Q)
            Logic::Lisbon => {
                let boxed = HyperPredicate::Box(t.post.negate(space)).compile(&self.evaluator())?;
                let mut hit = None;
                for s in ids(&p) {
                    if boxed.holds(space, &ids(&reach.row(s)?)) {
                        hit = Some(s);
                        break;
                    }
                }
                hit.map(|s| {
                    let dual = Triple::new(Logic::Hl, StatePredicate::States(vec![s]), t.program.clone(), t.post.negate(space));
                    (Witness { initial: Some(s), final_: None }, dual)
                })
            }
            // Q ∩ sp⟦C⟧(¬P) ≠ ∅
            Logic::Pil => {
                let from_outside = reach.post(&not(&p))?;
                (0..q.len()).find(|&x| q[x] && from_outside[x]).map(|tau| {
                    let dual = Triple::new(Logic::Il, t.pre.negate(space), t.program.clone(), StatePredicate::States(vec![tau]));
                    (Witness { initial: None, final_: Some(tau) }, dual)
                })
            }
            // ∃τ ∈ Q ∖ sp⟦C⟧(P)
            Logic::Il => {
                let from_p = reach.post(&p)?;
                (0..q.len()).find(|&x| q[x] && !from_p[x]).map(|tau| {
                    let dual = Triple::new(Logic::Pil, t.pre.negate(space), t.program.clone(), StatePredicate::States(vec![tau]));
                    (Witness { initial: None, final_: Some(tau) }, dual)
                })
            }
        };
        Ok(match found {
            Some((w, dual)) => {
                let dual_verified = self.check_triple(&dual)?.holds;
                Disproof { disproved: true, witness: Some(w), dual: Some(dual), dual_verified }
            }
            None => Disproof { disproved: false, witness: None, dual: None, dual_verified: false },
        })
    }

    /// The four universal rows and their four existential negations.
    pub fn termination_report(&self, program: &Program, pre: &StatePredicate, post: &StatePredicate) -> Result<Vec<TerminationRow>> {
        let ev = self.evaluator();
        let p = pre.mask(&ev)?;
        let q = post.mask(&ev)?;
        let n = self.space.size();
        let reach = Reach::new(self, program);
        let everything = vec![true; n];
        let reachable = reach.post(&everything)?;
        let mut terminating = Vec::with_capacity(n);
        for s in 0..n {
            terminating.push(reach.row(s)?.iter().any(|&b| b));
        }
        let all = |set: &[bool], good: &dyn Fn(usize) -> bool| match (0..n).find(|&i| set[i] && !good(i)) {
            None => (true, None),
            Some(i) => (false, Some(i)),
        };
        let any = |set: &[bool], good: &dyn Fn(usize) -> bool| match (0..n).find(|&i| set[i] && good(i)) {
            Some(i) => (true, Some(i)),
            None => (false, None),
        };
        let initial = |(holds, w): (bool, Option<usize>)| Verdict { holds, witness: w.map(|i| Witness { initial: Some(i), final_: None }) };
        let final_ = |(holds, w): (bool, Option<usize>)| Verdict { holds, witness: w.map(|i| Witness { initial: None, final_: Some(i) }) };
        let row = |property, triple: &str, verdict| TerminationRow { property, triple: triple.to_string(), verdict };
        Ok(vec![
            row("must-nontermination", "hl <P> C <false>", initial(all(&p, &|s| !terminating[s]))),
            row("may-termination", "lisbon <P> C <true>", initial(all(&p, &|s| terminating[s]))),
            row("unreachability", "pil [false] C [Q]", final_(all(&q, &|t| !reachable[t]))),
            row("reachability", "il [true] C [Q]", final_(all(&q, &|t| reachable[t]))),
            row("exists may-termination", "not hl <P> C <false>", initial(any(&p, &|s| terminating[s]))),
            row("exists must-nontermination", "not lisbon <P> C <true>", initial(any(&p, &|s| !terminating[s]))),
            row("exists reachability", "not pil [false] C [Q]", final_(any(&q, &|t| reachable[t]))),
            row("exists unreachability", "not il [true] C [Q]", final_(any(&q, &|t| !reachable[t]))),
        ])
    }

    /// Whether `set` satisfies `pre` while its reachable set violates `post`.
    pub fn check_counterexample(&self, pre: &HyperPredicate, program: &Program, post: &HyperPredicate, set: &[usize]) -> Result<bool> {
        let ev = self.evaluator();
        let (pre, post) = (pre.compile(&ev)?, post.compile(&ev)?);
        let reach = Reach::new(self, program);
        Ok(self.counterexample(&pre, &post, &reach, set)?.is_some())
    }

    fn counterexample(&self, pre: &CompiledPredicate, post: &CompiledPredicate, reach: &Reach<'_>, set: &[usize]) -> Result<Option<Vec<usize>>> {
        let mut set = set.to_vec();
        set.sort_unstable();
        set.dedup();
        if !pre.holds(&self.space, &set) {
            return Ok(None);
        }
        let mut mask = vec![false; self.space.size()];
        for &s in &set {
            mask[s] = true;
        }
        let out = ids(&reach.post(&mask)?);
        Ok((!post.holds(&self.space, &out)).then_some(out))
    }

    /// Checks `supp(⌈pre⌉) ⊆ supp(whp⟦C⟧(⌈post⌉))` over sets of states.
    pub fn check_hyper_triple(&self, pre: &HyperPredicate, program: &Program, post: &HyperPredicate, strategy: Strategy) -> Result<HyperVerdict> {
        let ev = self.evaluator();
        let (pre, post) = (pre.compile(&ev)?, post.compile(&ev)?);
        let reach = Reach::new(self, program);
        let n = self.space.size();
        let mut checked = 0;
        let mut try_set = |set: Vec<usize>| -> Result<Option<HyperVerdict>> {
            checked += 1;
            Ok(self.counterexample(&pre, &post, &reach, &set)?.map(|post_set| HyperVerdict::Disproved { pre_set: set, post_set }))
        };
        match strategy {
            Strategy::Exhaustive => {
                if n > EXHAUSTIVE_LIMIT {
                    return Err(Error::ExhaustiveTooLarge { states: n, limit: EXHAUSTIVE_LIMIT });
                }
                for bits in 0u32..(1u32 << n) {
                    let set: Vec<usize> = (0..n).filter(|i| bits >> i & 1 == 1).collect();
                    if let Some(v) = try_set(set)? {
                        return Ok(v);
                    }
                }
                Ok(HyperVerdict::Proved { checked })
            }
            Strategy::Search => {
                if let Some(v) = try_set(Vec::new())? {
                    return Ok(v);
                }
                for i in 0..n {
                    if let Some(v) = try_set(vec![i])? {
                        return Ok(v);
                    }
                }
                for i in 0..n {
                    for j in i + 1..n {
                        if let Some(v) = try_set(vec![i, j])? {
                            return Ok(v);
                        }
                    }
                }
                let mut rng = ChaCha8Rng::seed_from_u64(SEARCH_SEED);
                for _ in 0..RANDOM_SUBSETS {
                    let mut size = 1;
                    while size < n && rng.gen_bool(0.5) {
                        size += 1;
                    }
                    let mut set = sample(&mut rng, n, size).into_vec();
                    set.sort_unstable();
                    if let Some(v) = try_set(set)? {
                        return Ok(v);
                    }
                }
                Ok(HyperVerdict::NoCounterexampleFound { checked })
            }
        }
    }
}
