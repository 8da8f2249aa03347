//! Lexer and recursive-descent parser for programs, expressions and queries.

mod lexer;
mod parser;

pub use lexer::{tokenize, Tok, Token};
pub use parser::{parse_expr, parse_program, parse_stmt, Parser};
