//! Programs: the surface language with sugar, the six-constructor core it
//! elaborates to, and the well-definedness check for partial semirings.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Evaluator, Expr};
use crate::semiring::Semiring;
use crate::state::{OverflowMode, StateSpace};

/// Core program after elaboration.
#[derive(Debug, Clone, PartialEq)]
pub enum Program {
    Assign(String, Expr),
    NondetAssign(String),
    Weight(Expr),
    Seq(Box<Program>, Box<Program>),
    Choice(Box<Program>, Box<Program>),
    /// `⟨body⟩⟨e, e′⟩`: iterate with weight `e`, exit with weight `e′`.
    Loop(Box<Program>, Expr, Expr),
}

impl Program {
    pub fn assign(x: &str, e: Expr) -> Program {
        Program::Assign(x.to_string(), e)
    }

    pub fn nondet(x: &str) -> Program {
        Program::NondetAssign(x.to_string())
    }

    pub fn weight(e: Expr) -> Program {
        Program::Weight(e)
    }

    pub fn skip() -> Program {
        Program::Weight(Expr::One)
    }

    pub fn diverge() -> Program {
        Program::Weight(Expr::Zero)
    }

    pub fn assume(b: Expr) -> Program {
        Program::Weight(Expr::iverson(b))
    }

    pub fn seq(a: Program, b: Program) -> Program {
        Program::Seq(Box::new(a), Box::new(b))
    }

    pub fn choice(a: Program, b: Program) -> Program {
        Program::Choice(Box::new(a), Box::new(b))
    }

    pub fn looped(body: Program, e: Expr, exit: Expr) -> Program {
        Program::Loop(Box::new(body), e, exit)
    }

    /// Right-nested sequence of the given programs; `skip` when empty.
    pub fn block(parts: impl IntoIterator<Item = Program>) -> Program {
        let mut parts: Vec<Program> = parts.into_iter().collect();
        let mut acc = match parts.pop() {
            Some(p) => p,
            None => return Program::skip(),
        };
        while let Some(p) = parts.pop() {
            acc = Program::seq(p, acc);
        }
        acc
    }

    pub fn ite(b: Expr, then: Program, otherwise: Program) -> Program {
        elaborate(&Stmt::new(StmtKind::If(b, Box::new(to_surface(&then)), Box::new(to_surface(&otherwise)))))
    }

    pub fn while_loop(b: Expr, body: Program) -> Program {
        Program::looped(body, Expr::iverson(b.clone()), Expr::iverson(Expr::not(b)))
    }

    pub fn has_loops(&self) -> bool {
        match self {
            Program::Loop(..) => true,
            Program::Seq(a, b) | Program::Choice(a, b) => a.has_loops() || b.has_loops(),
            _ => false,
        }
    }

    pub fn has_nondet(&self) -> bool {
        match self {
            Program::NondetAssign(_) => true,
            Program::Seq(a, b) | Program::Choice(a, b) => a.has_nondet() || b.has_nondet(),
            Program::Loop(c, ..) => c.has_nondet(),
            _ => false,
        }
    }

    /// Variables the program mentions, in first-occurrence order.
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut push = |v: String| {
            if !out.contains(&v) {
                out.push(v)
            }
        };
        fn walk(p: &Program, push: &mut dyn FnMut(String)) {
            match p {
                Program::Assign(x, e) => {
                    push(x.clone());
                    e.variables().into_iter().for_each(&mut *push);
                }
                Program::NondetAssign(x) => push(x.clone()),
                Program::Weight(e) => e.variables().into_iter().for_each(push),
                Program::Seq(a, b) | Program::Choice(a, b) => {
                    walk(a, push);
                    walk(b, push);
                }
                Program::Loop(c, e, f) => {
                    walk(c, push);
                    e.variables().into_iter().for_each(&mut *push);
                    f.variables().into_iter().for_each(push);
                }
            }
        }
        walk(self, &mut push);
        out
    }

    /// Leftmost weight statement of a sequence, the guard of a choice branch.
    fn guard(&self) -> Option<&Expr> {
        match self {
            Program::Weight(e) => Some(e),
            Program::Seq(a, _) => a.guard(),
            _ => None,
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", to_surface(self))
    }
}

/// Line and column of a surface statement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Assign(String, Expr),
    Nondet(String),
    Weight(Expr),
    Assume(Expr),
    Skip,
    Diverge,
    Seq(Box<Stmt>, Box<Stmt>),
    Choice(Box<Stmt>, Box<Stmt>),
    /// `C₁ [p] C₂`
    PChoice(Box<Stmt>, Expr, Box<Stmt>),
    If(Expr, Box<Stmt>, Box<Stmt>),
    While(Expr, Box<Stmt>),
    Loop(Box<Stmt>, Expr, Expr),
    Star(Box<Stmt>),
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Stmt {
        Stmt { kind, span: Span::default() }
    }

    pub fn at(kind: StmtKind, span: Span) -> Stmt {
        Stmt { kind, span }
    }
}

/// Desugars a surface statement into the core language.
pub fn elaborate(s: &Stmt) -> Program {
    use StmtKind::*;
    let e = |s: &Stmt| Box::new(elaborate(s));
    match &s.kind {
        Assign(x, v) => Program::Assign(x.clone(), v.clone()),
        Nondet(x) => Program::NondetAssign(x.clone()),
        Weight(w) => Program::Weight(w.clone()),
        Assume(b) => Program::Weight(Expr::iverson(b.clone())),
        Skip => Program::skip(),
        Diverge => Program::diverge(),
        Seq(a, b) => Program::Seq(e(a), e(b)),
        Choice(a, b) => Program::Choice(e(a), e(b)),
        PChoice(a, p, b) => Program::choice(
            Program::seq(Program::Weight(p.clone()), elaborate(a)),
            Program::seq(Program::Weight(complement(p)), elaborate(b)),
        ),
        If(b, t, f) => Program::choice(
            Program::seq(Program::Weight(Expr::iverson(b.clone())), elaborate(t)),
            Program::seq(Program::Weight(Expr::iverson(Expr::not(b.clone()))), elaborate(f)),
        ),
        While(b, body) => {
            Program::Loop(e(body), Expr::iverson(b.clone()), Expr::iverson(Expr::not(b.clone())))
        }
        Loop(body, w, x) => Program::Loop(e(body), w.clone(), x.clone()),
        Star(body) => Program::Loop(e(body), Expr::One, Expr::One),
    }
}

/// `1 − p`, folded for literals.
fn complement(p: &Expr) -> Expr {
    match p {
        Expr::Real(r) => Expr::Real(1.0 - r),
        Expr::Int(i) => Expr::Int(1 - i),
        other => Expr::One.sub(other.clone()),
    }
}

/// The surface statement that prints as a core program.
pub fn to_surface(p: &Program) -> Stmt {
    let b = |p: &Program| Box::new(to_surface(p));
    Stmt::new(match p {
        Program::Assign(x, e) => StmtKind::Assign(x.clone(), e.clone()),
        Program::NondetAssign(x) => StmtKind::Nondet(x.clone()),
        Program::Weight(e) => StmtKind::Weight(e.clone()),
        Program::Seq(x, y) => StmtKind::Seq(b(x), b(y)),
        Program::Choice(x, y) => StmtKind::Choice(b(x), b(y)),
        Program::Loop(c, e, x) => StmtKind::Loop(b(c), e.clone(), x.clone()),
    })
}

// Printing precedence: 0 sequence, 1 choice, 2 atom.
fn prec(k: &StmtKind) -> u8 {
    match k {
        StmtKind::Seq(..) => 0,
        StmtKind::Choice(..) | StmtKind::PChoice(..) => 1,
        _ => 2,
    }
}

struct At<'a>(&'a Stmt, u8);

impl fmt::Display for At<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if prec(&self.0.kind) < self.1 {
            write!(f, "{{ {} }}", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use StmtKind::*;
        match &self.kind {
            Assign(x, e) => write!(f, "{x} := {e}"),
            Nondet(x) => write!(f, "{x} := nondet()"),
            Weight(e) => write!(f, "weight({e})"),
            Assume(b) => write!(f, "assume({b})"),
            Skip => f.write_str("skip"),
            Diverge => f.write_str("diverge"),
            Seq(a, b) => write!(f, "{}; {}", At(a, 1), At(b, 0)),
            Choice(a, b) => write!(f, "{} [] {}", At(a, 1), At(b, 2)),
            PChoice(a, p, b) => write!(f, "{} [{p}] {}", At(a, 1), At(b, 2)),
            If(b, t, e) => write!(f, "if {b} {{ {t} }} else {{ {e} }}"),
            While(b, c) => write!(f, "while {b} {{ {c} }}"),
            Loop(c, e, x) => write!(f, "loop {{ {c} }} weight {e} exit {x}"),
            Star(c) => write!(f, "{{ {c} }}*"),
        }
    }
}

/// A parsed program file: header plus body.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgramFile {
    pub vars: Vec<String>,
    pub domain: Option<i64>,
    pub overflow: OverflowMode,
    pub body: Stmt,
}

impl ProgramFile {
    pub fn program(&self) -> Program {
        elaborate(&self.body)
    }

    /// The declared state space; `domain` overrides the header.
    pub fn space(&self, domain: Option<i64>, default_domain: i64) -> Result<StateSpace> {
        let d = domain.or(self.domain).unwrap_or(default_domain);
        Ok(StateSpace::new(self.vars.clone(), d)?.with_overflow(self.overflow))
    }
}

impl fmt::Display for ProgramFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {};", self.vars.join(", "))?;
        if let Some(d) = self.domain {
            writeln!(f, "domain {d};")?;
        }
        if self.overflow == OverflowMode::Clamp {
            writeln!(f, "overflow clamp;")?;
        }
        writeln!(f, "{}", self.body)
    }
}

/// Rejects programs whose meaning needs an undefined `⊕`.
///
/// Total semirings only need declared variables. For partial ones,
/// nondeterministic assignment and unguarded choice are rejected, and the
/// guards of every choice and the weights of every loop must be summable in
/// every state.
pub fn check_well_defined<S: Semiring>(p: &Program, s: &S, space: &StateSpace) -> Result<()> {
    for v in p.variables() {
        space.require(&v)?;
    }
    if !s.is_partial() {
        return Ok(());
    }
    check_partial(p, &Evaluator::new(s, space))
}

fn check_partial<S: Semiring>(p: &Program, ev: &Evaluator<'_, S>) -> Result<()> {
    let node = || p.to_string();
    match p {
        Program::Assign(..) | Program::Weight(_) => Ok(()),
        Program::NondetAssign(_) => Err(Error::WellDefinedness {
            node: node(),
            reason: format!("nondeterministic assignment in partial semiring {}", ev.semiring.name()),
            witness: None,
        }),
        Program::Seq(a, b) => {
            check_partial(a, ev)?;
            check_partial(b, ev)
        }
        Program::Choice(a, b) => {
            match (a.guard(), b.guard()) {
                (Some(g1), Some(g2)) => compatible(ev, g1, g2, &node)?,
                _ => {
                    return Err(Error::WellDefinedness {
                        node: node(),
                        reason: "choice branches must both start with a weight".into(),
                        witness: None,
                    })
                }
            }
            check_partial(a, ev)?;
            check_partial(b, ev)
        }
        Program::Loop(c, e, x) => {
            compatible(ev, e, x, &node)?;
            check_partial(c, ev)
        }
    }
}

fn compatible<S: Semiring>(ev: &Evaluator<'_, S>, a: &Expr, b: &Expr, node: &dyn Fn() -> String) -> Result<()> {
    let space = ev.space;
    let mut env = vec![0; space.vars().len()];
    for id in 0..space.size() {
        space.decode_into(id, &mut env);
        let x = ev.eval_weight(a, &env)?;
        let y = ev.eval_weight(b, &env)?;
        if let Err(e) = ev.semiring.add(&x, &y) {
            return Err(Error::WellDefinedness {
                node: node(),
                reason: format!("weights {a} and {b} are not compatible ({e})"),
                witness: Some(space.show(id)),
            });
        }
    }
    Ok(())
}
