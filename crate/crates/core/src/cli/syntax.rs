//! Surface syntax: lexer, AST, parser and the pretty-printer.
//!
//! ```text
//! dx = <expr>;  dy = <expr>;  V = <expr>;
//! param <name> = <rational>;
//! weights = (<int>, <int>);
//! sweep <name> from <rational> to <rational> steps <int>;
//! ```
//! `#` starts a comment that runs to the end of the line.

use crate::Rat;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// 1-based line and column (in characters), plus the byte offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
    pub offset: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("unbound parameter `{name}` at {pos}")]
    Unbound { name: String, pos: Pos },
    #[error("non-polynomial expression at {pos}: {message}")]
    NonPolynomial { pos: Pos, message: String },
    #[error("invalid input at {pos}: {message}")]
    Invalid { pos: Pos, message: String },
}

impl InputError {
    pub fn pos(&self) -> Pos {
        match self {
            InputError::Syntax { pos, .. }
            | InputError::Unbound { pos, .. }
            | InputError::NonPolynomial { pos, .. }
            | InputError::Invalid { pos, .. } => *pos,
        }
    }
}

/// Expression tree. Literals are non-negative integers; signs and fractions
/// are expressed with `Neg` and `Div`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Int(_) | Expr::Var(_) => 5,
        }
    }

    /// Identifiers other than `x` and `y`, in order of first appearance.
    pub fn parameters(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<String>) {
        match self {
            Expr::Int(_) => {}
            Expr::Var(v) => {
                if v != "x" && v != "y" && !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    fn write(&self, min: u8, out: &mut String) {
        let paren = self.prec() < min;
        if paren {
            out.push('(');
        }
        match self {
            Expr::Int(n) => out.push_str(&n.to_string()),
            Expr::Var(v) => out.push_str(v),
            Expr::Neg(a) => {
                out.push('-');
                a.write(3, out);
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write(1, out);
                out.push_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " });
                b.write(2, out);
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.write(2, out);
                out.push(if matches!(self, Expr::Mul(..)) { '*' } else { '/' });
                b.write(3, out);
            }
            Expr::Pow(a, n) => {
                a.write(5, out);
                out.push('^');
                out.push_str(&n.to_string());
            }
        }
        if paren {
            out.push(')');
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(0, &mut s);
        f.write_str(&s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Dx(Expr),
    Dy(Expr),
    Param(String, Rat),
    Weights(u32, u32),
    V(Expr),
    Sweep { name: String, from: Rat, to: Rat, steps: u32 },
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Dx(e) => write!(f, "dx = {e};"),
            Stmt::Dy(e) => write!(f, "dy = {e};"),
            Stmt::Param(n, v) => write!(f, "param {n} = {v};"),
            Stmt::Weights(p, q) => write!(f, "weights = ({p},{q});"),
            Stmt::V(e) => write!(f, "V = {e};"),
            Stmt::Sweep { name, from, to, steps } => write!(f, "sweep {name} from {from} to {to} steps {steps};"),
        }
    }
}

/// Parsed input. Equality ignores source positions.
#[derive(Clone, Debug)]
pub struct Program {
    pub stmts: Vec<Stmt>,
    pub positions: Vec<Pos>,
}

impl PartialEq for Program {
    fn eq(&self, o: &Self) -> bool {
        self.stmts == o.stmts
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stmts {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

pub const KEYWORDS: [&str; 9] = ["dx", "dy", "param", "weights", "V", "sweep", "from", "to", "steps"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, InputError> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut it = src.char_indices().peekable();
    while let Some(&(off, c)) = it.peek() {
        let pos = Pos { line, col, offset: off };
        if c == '\n' {
            it.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            it.next();
            col += 1;
        } else if c == '#' {
            while let Some(&(_, c)) = it.peek() {
                if c == '\n' {
                    break;
                }
                it.next();
                col += 1;
            }
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&(_, d)) = it.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                s.push(d);
                it.next();
                col += 1;
            }
            out.push((Tok::Int(BigInt::from_str(&s).expect("digits")), pos));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&(_, d)) = it.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_') {
                    break;
                }
                s.push(d);
                it.next();
                col += 1;
            }
            out.push((Tok::Ident(s), pos));
        } else if "=;(),+-*/^".contains(c) {
            out.push((Tok::Sym(c), pos));
            it.next();
            col += 1;
        } else if c == '.' {
            return Err(InputError::Syntax { pos, message: "decimal literals are not accepted; write a fraction a/b".into() });
        } else {
            return Err(InputError::Syntax { pos, message: format!("unexpected character `{c}`") });
        }
    }
    out.push((Tok::Eof, Pos { line, col, offset: src.len() }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
}

type PResult<T> = Result<T, InputError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }
    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }
    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if t != Tok::Eof {
            self.i += 1;
        }
        t
    }
    fn err<T>(&self, what: &str) -> PResult<T> {
        Err(InputError::Syntax { pos: self.pos(), message: format!("expected {what}, found {}", self.peek()) })
    }
    fn sym(&mut self, c: char) -> PResult<()> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.err(&format!("`{c}`"))
        }
    }
    fn keyword(&mut self, k: &str) -> PResult<()> {
        match self.peek() {
            Tok::Ident(s) if s == k => {
                self.bump();
                Ok(())
            }
            _ => self.err(&format!("`{k}`")),
        }
    }
    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.err("a name"),
        }
    }
    fn int(&mut self) -> PResult<BigInt> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.err("an integer"),
        }
    }
    fn small_int(&mut self) -> PResult<u32> {
        let pos = self.pos();
        let n = self.int()?;
        n.to_u32().ok_or(InputError::Invalid { pos, message: format!("integer {n} out of range") })
    }
    fn rational(&mut self) -> PResult<Rat> {
        let neg = if *self.peek() == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        let n = self.int()?;
        let d = if *self.peek() == Tok::Sym('/') {
            self.bump();
            let pos = self.pos();
            let d = self.int()?;
            if d.is_zero() {
                return Err(InputError::Invalid { pos, message: "zero denominator".into() });
            }
            d
        } else {
            BigInt::from(1)
        };
        let r = Rat::new(n, d);
        Ok(if neg { -r } else { r })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Sym('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }
    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Sym('/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }
    fn unary(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if *self.peek() == Tok::Sym('^') {
            self.bump();
            let pos = self.pos();
            if *self.peek() == Tok::Sym('-') {
                return Err(InputError::NonPolynomial { pos, message: "negative exponent".into() });
            }
            let n = self.small_int()?;
            return Ok(Expr::Pow(Box::new(base), n));
        }
        Ok(base)
    }
    fn atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Ident(s) => {
                if KEYWORDS.contains(&s.as_str()) {
                    return self.err("an expression");
                }
                self.bump();
                Ok(Expr::Var(s))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.sym(')')?;
                Ok(e)
            }
            _ => self.err("an expression"),
        }
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let head = match self.peek().clone() {
            Tok::Ident(s) => s,
            _ => return self.err("a statement"),
        };
        self.bump();
        let s = match head.as_str() {
            "dx" | "dy" | "V" => {
                self.sym('=')?;
                let e = self.expr()?;
                match head.as_str() {
                    "dx" => Stmt::Dx(e),
                    "dy" => Stmt::Dy(e),
                    _ => Stmt::V(e),
                }
            }
            "param" => {
                let name = self.param_name()?;
                self.sym('=')?;
                Stmt::Param(name, self.rational()?)
            }
            "weights" => {
                self.sym('=')?;
                self.sym('(')?;
                let p = self.small_int()?;
                self.sym(',')?;
                let q = self.small_int()?;
                self.sym(')')?;
                Stmt::Weights(p, q)
            }
            "sweep" => {
                let name = self.param_name()?;
                self.keyword("from")?;
                let from = self.rational()?;
                self.keyword("to")?;
                let to = self.rational()?;
                self.keyword("steps")?;
                let steps = self.small_int()?;
                Stmt::Sweep { name, from, to, steps }
            }
            _ => {
                self.i -= 1;
                return self.err("a statement (dx, dy, V, param, weights, sweep)");
            }
        };
        self.sym(';')?;
        Ok(s)
    }
    fn param_name(&mut self) -> PResult<String> {
        let pos = self.pos();
        let n = self.ident()?;
        if n == "x" || n == "y" || KEYWORDS.contains(&n.as_str()) {
            return Err(InputError::Invalid { pos, message: format!("`{n}` cannot be used as a parameter name") });
        }
        Ok(n)
    }
}

/// Syntax-only parse.
pub fn parse_program(src: &str) -> Result<Program, InputError> {
    let mut p = Parser { toks: lex(src)?, i: 0 };
    let mut stmts = Vec::new();
    let mut positions = Vec::new();
    while *p.peek() != Tok::Eof {
        positions.push(p.pos());
        stmts.push(p.stmt()?);
    }
    Ok(Program { stmts, positions })
}
