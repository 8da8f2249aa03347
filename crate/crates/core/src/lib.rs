//! Weighted programs over semirings: denotational semantics, strongest
//! post and weakest pre transformers, hyperquantity transformers, program
//! logic checkers and a path-enumeration oracle.

pub mod error;
pub mod expr;
pub mod hyper;
pub mod logic;
pub mod oracle;
pub mod program;
pub mod quantity;
pub mod query;
pub mod semantics;
pub mod semiring;
pub mod state;
pub mod syntax;
pub mod transformers;

pub use error::{Error, ParseError, Result};
pub use expr::{BinOp, Evaluator, Expr};
pub use hyper::{derived::Derived, CompiledPredicate, HyperPredicate, Hyperquantity, StatePredicate, Whp};
pub use logic::{Disproof, HyperVerdict, Logic, Strategy, TerminationRow, Triple, Verdict, Witness};
pub use oracle::{Oracle, OracleResult, Path, Paths};
pub use program::{check_well_defined, elaborate, Program, ProgramFile, Stmt, StmtKind};
pub use quantity::Quantity;
pub use query::{parse_query, QuantityExpr, Query};
pub use semantics::{Engine, FixpointConfig, FixpointStats, WeightMatrix};
pub use semiring::{Boolean, Lang, LangValue, MaxMin, Prob, Semiring, SemiringKind, Tropical};
pub use state::{OverflowMode, StateSpace};
