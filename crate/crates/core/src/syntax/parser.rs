use crate::error::ParseError;
use crate::expr::{BinOp, Expr};
use crate::program::{ProgramFile, Span, Stmt, StmtKind};
use crate::state::OverflowMode;

use super::lexer::{tokenize, Tok, Token};

const KEYWORDS: &[&str] = &[
    "skip", "diverge", "weight", "assume", "if", "else", "while", "loop", "exit", "nondet", "true", "false", "one",
    "zero", "inf", "lang", "ite", "min", "max", "clamp",
];

type PResult<T> = Result<T, ParseError>;

/// Token cursor shared by the program and query grammars.
#[derive(Debug, Clone)]
pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub fn new(src: &str) -> PResult<Parser> {
        Ok(Parser { toks: tokenize(src)?, pos: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    pub fn span(&self) -> Span {
        let t = &self.toks[self.pos];
        Span { line: t.line, column: t.column }
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError { line: t.line, column: t.column, message: message.into() }
    }

    pub fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == w)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.is_sym(s);
        if hit {
            self.bump();
        }
        hit
    }

    pub fn eat_word(&mut self, w: &str) -> bool {
        let hit = self.is_word(w);
        if hit {
            self.bump();
        }
        hit
    }

    pub fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`, found {}", describe(self.peek()))))
        }
    }

    pub fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.eat_word(w) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{w}`, found {}", describe(self.peek()))))
        }
    }

    pub fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(x)
            }
            t => Err(self.error(format!("expected a name, found {}", describe(&t)))),
        }
    }

    pub fn int(&mut self) -> PResult<i64> {
        let neg = self.eat_sym("-");
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(if neg { -v } else { v })
            }
            t => Err(self.error(format!("expected an integer, found {}", describe(&t)))),
        }
    }

    /// A real or integer literal, possibly negative or `inf`.
    pub fn number(&mut self) -> PResult<f64> {
        let neg = self.eat_sym("-");
        let v = match self.peek().clone() {
            Tok::Int(v) => v as f64,
            Tok::Real(v) => v,
            Tok::Ident(w) if w == "inf" => f64::INFINITY,
            t => return Err(self.error(format!("expected a number, found {}", describe(&t)))),
        };
        self.bump();
        Ok(if neg { -v } else { v })
    }

    pub fn finish(&self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {}", describe(self.peek()))))
        }
    }

    // ---- expressions ----

    pub fn expr(&mut self) -> PResult<Expr> {
        let mut e = self.conj()?;
        while self.eat_sym("||") {
            e = Expr::bin(BinOp::Or, e, self.conj()?);
        }
        Ok(e)
    }

    fn conj(&mut self) -> PResult<Expr> {
        let mut e = self.negation()?;
        while self.eat_sym("&&") {
            e = Expr::bin(BinOp::And, e, self.negation()?);
        }
        Ok(e)
    }

    fn negation(&mut self) -> PResult<Expr> {
        if self.is_sym("!") && !matches!(self.peek_at(1), Tok::Sym("=")) {
            self.bump();
            return Ok(Expr::not(self.negation()?));
        }
        self.comparison()
    }

    // `a < b <= c` means `a < b && b <= c`
    fn comparison(&mut self) -> PResult<Expr> {
        let first = self.sum()?;
        let mut conjuncts = Vec::new();
        let mut left = first.clone();
        while let Some(op) = self.comparison_op() {
            let right = self.sum()?;
            conjuncts.push(Expr::bin(op, left, right.clone()));
            left = right;
        }
        Ok(conjuncts.into_iter().reduce(|a, b| Expr::bin(BinOp::And, a, b)).unwrap_or(first))
    }

    fn comparison_op(&mut self) -> Option<BinOp> {
        let op = match self.peek() {
            Tok::Sym("==") | Tok::Sym("=") => BinOp::Eq,
            Tok::Sym("!=") => BinOp::Ne,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            _ => return None,
        };
        self.bump();
        Some(op)
    }

    fn sum(&mut self) -> PResult<Expr> {
        let mut e = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("+") => BinOp::Add,
                Tok::Sym("-") => BinOp::Sub,
                _ => return Ok(e),
            };
            self.bump();
            e = Expr::bin(op, e, self.product()?);
        }
    }

    fn product(&mut self) -> PResult<Expr> {
        let mut e = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("*") => BinOp::Mul,
                Tok::Sym("%") => BinOp::Mod,
                _ => return Ok(e),
            };
            // `{ C }*` never reaches here; a `*` before a statement
            // separator is left for the caller
            if matches!(self.peek_at(1), Tok::Sym(";") | Tok::Sym("}") | Tok::Sym(")") | Tok::Eof) {
                return Ok(e);
            }
            self.bump();
            e = Expr::bin(op, e, self.unary()?);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat_sym("-") {
            return Ok(match self.unary()? {
                Expr::Int(v) => Expr::Int(-v),
                Expr::Real(v) => Expr::Real(-v),
                Expr::Inf => Expr::Real(f64::NEG_INFINITY),
                e => Expr::neg(e),
            });
        }
        if self.is_sym("!") {
            self.bump();
            return Ok(Expr::not(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<Expr> {
        let tok = self.peek().clone();
        match tok {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::Real(v) => {
                self.bump();
                Ok(Expr::Real(v))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Sym("[") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym("]")?;
                Ok(Expr::iverson(e))
            }
            Tok::Ident(w) => {
                self.bump();
                match w.as_str() {
                    "true" => Ok(Expr::Bool(true)),
                    "false" => Ok(Expr::Bool(false)),
                    "inf" => Ok(Expr::Inf),
                    "one" => Ok(Expr::One),
                    "zero" => Ok(Expr::Zero),
                    "lang" => self.lang_literal(),
                    "ite" => {
                        let mut args = self.args(3)?;
                        let b = args.pop().unwrap();
                        let a = args.pop().unwrap();
                        Ok(Expr::ite(args.pop().unwrap(), a, b))
                    }
                    "min" | "max" => {
                        let mut args = self.args(2)?;
                        let b = args.pop().unwrap();
                        let op = if w == "min" { BinOp::Min } else { BinOp::Max };
                        Ok(Expr::bin(op, args.pop().unwrap(), b))
                    }
                    "clamp" => Ok(Expr::Clamp(Box::new(self.args(1)?.pop().unwrap()))),
                    _ if KEYWORDS.contains(&w.as_str()) => {
                        self.pos -= 1;
                        Err(self.error(format!("unexpected keyword `{w}` in expression")))
                    }
                    _ => Ok(Expr::Var(w)),
                }
            }
            t => Err(self.error(format!("expected an expression, found {}", describe(&t)))),
        }
    }

    fn args(&mut self, n: usize) -> PResult<Vec<Expr>> {
        self.expect_sym("(")?;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                self.expect_sym(",")?;
            }
            out.push(self.expr()?);
        }
        self.expect_sym(")")?;
        Ok(out)
    }

    pub fn lang_literal(&mut self) -> PResult<Expr> {
        self.expect_sym("{")?;
        let mut words = Vec::new();
        if !self.is_sym("}") {
            loop {
                let w = self.ident()?;
                if w != "eps" && !w.chars().all(|c| c.is_ascii_lowercase()) {
                    return Err(self.error(format!("`{w}` is not a word over a..z")));
                }
                words.push(if w == "eps" { String::new() } else { w });
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym("}")?;
        Ok(Expr::Words(words))
    }

    // ---- statements ----

    pub fn stmt(&mut self) -> PResult<Stmt> {
        let span = self.span();
        let first = self.choice()?;
        if !self.eat_sym(";") || self.ends_block() {
            return Ok(first);
        }
        let rest = self.stmt()?;
        Ok(Stmt::at(StmtKind::Seq(Box::new(first), Box::new(rest)), span))
    }

    fn ends_block(&self) -> bool {
        matches!(self.peek(), Tok::Sym("}") | Tok::Sym(")") | Tok::Eof)
    }

    fn choice(&mut self) -> PResult<Stmt> {
        let span = self.span();
        let mut s = self.postfix()?;
        while self.eat_sym("[") {
            let kind = if self.eat_sym("]") {
                StmtKind::Choice(Box::new(s), Box::new(self.postfix()?))
            } else {
                let p = self.expr()?;
                self.expect_sym("]")?;
                StmtKind::PChoice(Box::new(s), p, Box::new(self.postfix()?))
            };
            s = Stmt::at(kind, span);
        }
        Ok(s)
    }

    fn postfix(&mut self) -> PResult<Stmt> {
        let span = self.span();
        let (mut s, starrable) = self.atomic()?;
        while self.is_sym("*") {
            if !starrable {
                return Err(self.error("`*` must follow a block; write `{ C }*`"));
            }
            self.bump();
            s = Stmt::at(StmtKind::Star(Box::new(s)), span);
        }
        Ok(s)
    }

    fn block(&mut self) -> PResult<Stmt> {
        let span = self.span();
        self.expect_sym("{")?;
        if self.eat_sym("}") {
            return Ok(Stmt::at(StmtKind::Skip, span));
        }
        let s = self.stmt()?;
        self.expect_sym("}")?;
        Ok(s)
    }

    fn atomic(&mut self) -> PResult<(Stmt, bool)> {
        let span = self.span();
        let at = |k| Stmt::at(k, span);
        if self.is_sym("{") {
            return Ok((self.block()?, true));
        }
        if self.eat_sym("(") {
            let s = self.stmt()?;
            self.expect_sym(")")?;
            return Ok((s, true));
        }
        let word = match self.peek().clone() {
            Tok::Ident(w) => w,
            t => return Err(self.error(format!("expected a statement, found {}", describe(&t)))),
        };
        if matches!(self.peek_at(1), Tok::Sym(":=")) {
            if KEYWORDS.contains(&word.as_str()) {
                return Err(self.error(format!("cannot assign to keyword `{word}`")));
            }
            self.bump();
            self.bump();
            if self.is_word("nondet") && matches!(self.peek_at(1), Tok::Sym("(")) {
                self.bump();
                self.expect_sym("(")?;
                self.expect_sym(")")?;
                return Ok((at(StmtKind::Nondet(word)), true));
            }
            return Ok((at(StmtKind::Assign(word, self.expr()?)), false));
        }
        self.bump();
        Ok(match word.as_str() {
            "skip" => (at(StmtKind::Skip), true),
            "diverge" => (at(StmtKind::Diverge), true),
            "weight" => {
                self.expect_sym("(")?;
                let e = self.expr()?;
                self.expect_sym(")")?;
                (at(StmtKind::Weight(e)), true)
            }
            "assume" => {
                self.expect_sym("(")?;
                let e = self.expr()?;
                self.expect_sym(")")?;
                (at(StmtKind::Assume(e)), true)
            }
            "if" => (self.if_rest(span)?, true),
            "while" => {
                let b = self.expr()?;
                let body = self.block()?;
                (at(StmtKind::While(b, Box::new(body))), true)
            }
            "loop" => {
                let body = self.block()?;
                self.expect_word("weight")?;
                let e = self.expr()?;
                self.expect_word("exit")?;
                let x = self.expr()?;
                (at(StmtKind::Loop(Box::new(body), e, x)), false)
            }
            _ => {
                self.pos -= 1;
                return Err(self.error(format!("expected a statement, found `{word}`")));
            }
        })
    }

    fn if_rest(&mut self, span: Span) -> PResult<Stmt> {
        let b = self.expr()?;
        let then = self.block()?;
        let otherwise = if self.eat_word("else") {
            if self.is_word("if") {
                let span = self.span();
                self.bump();
                self.if_rest(span)?
            } else {
                self.block()?
            }
        } else {
            Stmt::at(StmtKind::Skip, span)
        };
        Ok(Stmt::at(StmtKind::If(b, Box::new(then), Box::new(otherwise)), span))
    }

    /// `vars ...; domain n; overflow clamp|strict;` in any order, then the body.
    pub fn program_file(&mut self) -> PResult<ProgramFile> {
        let mut vars = None;
        let mut domain = None;
        let mut overflow = OverflowMode::Strict;
        loop {
            let is_header = matches!(self.peek_at(1), Tok::Ident(_) | Tok::Int(_));
            if self.is_word("vars") && is_header {
                self.bump();
                let mut vs = vec![self.ident()?];
                while self.eat_sym(",") {
                    vs.push(self.ident()?);
                }
                vars = Some(vs);
            } else if self.is_word("domain") && is_header {
                self.bump();
                let d = self.int()?;
                if d < 1 {
                    return Err(self.error("domain must be positive"));
                }
                domain = Some(d);
            } else if self.is_word("overflow") && is_header {
                self.bump();
                overflow = match self.ident()?.as_str() {
                    "clamp" => OverflowMode::Clamp,
                    "strict" => OverflowMode::Strict,
                    other => return Err(self.error(format!("unknown overflow mode `{other}`"))),
                };
            } else {
                break;
            }
            self.expect_sym(";")?;
        }
        let body = if self.at_eof() { Stmt::at(StmtKind::Skip, self.span()) } else { self.stmt()? };
        self.finish()?;
        let vars = match vars {
            Some(v) => v,
            None => crate::program::elaborate(&body).variables(),
        };
        Ok(ProgramFile { vars, domain, overflow, body })
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(x) => format!("`{x}`"),
        Tok::Int(v) => format!("`{v}`"),
        Tok::Real(v) => format!("`{v}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
    }
}

pub fn parse_expr(src: &str) -> PResult<Expr> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_stmt(src: &str) -> PResult<Stmt> {
    let mut p = Parser::new(src)?;
    let s = p.stmt()?;
    p.finish()?;
    Ok(s)
}

pub fn parse_program(src: &str) -> PResult<ProgramFile> {
    Parser::new(src)?.program_file()
}
