use crate::semiring::{AdditionUndefined, NotRepresentable};

/// Syntax error in a program or query, 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    AdditionUndefined(#[from] AdditionUndefined),
    #[error(transparent)]
    NotRepresentable(#[from] NotRepresentable),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("state space too large: {size} exceeds the cap of {cap}")]
    StateSpaceTooLarge { size: u128, cap: usize },
    #[error("domain overflow: {var} := {value} is outside 0..{domain} in state {state}{}", unrolling_note(.unrolling))]
    DomainOverflow {
        var: String,
        value: i64,
        domain: i64,
        state: String,
        /// 1-based loop body execution during which the write happened,
        /// when it happened inside a loop iteration.
        unrolling: Option<usize>,
    },
    #[error("type mismatch in `{expr}`: expected {expected}, found {found}")]
    TypeMismatch { expr: String, expected: &'static str, found: &'static str },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("integer arithmetic overflow in `{0}`")]
    ArithmeticOverflow(String),
    #[error("not well-defined: {reason} in `{node}`{}", witness_note(.witness))]
    WellDefinedness { node: String, reason: String, witness: Option<String> },
    #[error("fixpoint iteration did not converge within {max_iters} iterations")]
    FixpointBudgetExceeded { max_iters: usize },
    #[error("path enumeration exceeded the budget of {limit} paths")]
    PathBudgetExceeded { limit: usize },
    #[error("semiring {semiring} has no numeric embedding for `{what}`")]
    SemiringNotNumeric { semiring: String, what: String },
    #[error("hyperquantity evaluated to the negative value {value}")]
    NegativeHyperValue { value: f64 },
    #[error("hyperquantity `{node}` is not linear")]
    LinearityViolation { node: String },
    #[error("{what} requires the {expected} semiring, got {found}")]
    SemiringMismatch { what: String, expected: String, found: String },
    #[error("exhaustive check over {states} states exceeds the limit of {limit}")]
    ExhaustiveTooLarge { states: usize, limit: usize },
}

fn unrolling_note(u: &Option<usize>) -> String {
    match u {
        Some(n) => format!(" (loop unrolling {n})"),
        None => String::new(),
    }
}

fn witness_note(w: &Option<String>) -> String {
    match w {
        Some(s) => format!(" at state {s}"),
        None => String::new(),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
