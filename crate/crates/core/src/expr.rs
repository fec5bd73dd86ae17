//! Restricted arithmetic expressions.
//!
//! The grammar is deliberately small: decimal literals, the variables
//! `t`, `s` and `x`, the binary operators `+ - * /`, unary minus,
//! parentheses, and `^` with a constant integer exponent. There are no
//! function calls, so custom expressions cannot reach transcendental
//! functions or anything outside of field arithmetic.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := ("-" | "+") unary | power
//! power  := atom ("^" exponent)?
//! exponent := "-"? integer | "(" "-"? integer ")"
//! atom   := number | variable | "(" expr ")"
//! ```
//!
//! Unary minus binds looser than `^`, so `-t^2` is `-(t^2)`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A free variable of an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    T,
    S,
    X,
}

impl Var {
    fn from_name(name: &str) -> Option<Var> {
        match name {
            "t" => Some(Var::T),
            "s" => Some(Var::S),
            "x" => Some(Var::X),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::S => "s",
            Var::X => "x",
        }
    }
}

/// Values bound to the variables during evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Env {
    pub t: f64,
    pub s: f64,
    pub x: f64,
}

impl Env {
    pub fn ts(t: f64, s: f64) -> Env {
        Env { t, s, x: 0.0 }
    }

    fn get(&self, var: Var) -> f64 {
        match var {
            Var::T => self.t,
            Var::S => self.s,
            Var::X => self.x,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{message} at offset {offset} in `{source_text}`")]
pub struct ParseError {
    pub message: String,
    pub offset: usize,
    pub source_text: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
}

impl Node {
    fn eval(&self, env: &Env) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::Var(var) => env.get(*var),
            Node::Neg(a) => -a.eval(env),
            Node::Add(a, b) => a.eval(env) + b.eval(env),
            Node::Sub(a, b) => a.eval(env) - b.eval(env),
            Node::Mul(a, b) => a.eval(env) * b.eval(env),
            Node::Div(a, b) => a.eval(env) / b.eval(env),
            Node::Pow(a, n) => a.eval(env).powi(*n),
        }
    }
}

/// A parsed expression together with its source text.
#[derive(Debug, Clone)]
pub struct Expr {
    source: String,
    root: Node,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl Expr {
    /// Parses `source`, accepting only the variables listed in `allowed`.
    pub fn parse(source: &str, allowed: &[Var]) -> Result<Expr, ParseError> {
        let tokens = tokenize(source)?;
        let mut parser = Parser {
            source,
            tokens,
            pos: 0,
            allowed,
        };
        let root = parser.expr()?;
        if let Some(tok) = parser.peek() {
            return Err(parser.error(format!("unexpected `{}`", tok.kind), tok.offset));
        }
        Ok(Expr {
            source: source.to_string(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Evaluates the expression. Division by zero and overflow surface as
    /// non-finite results; callers decide whether that is an error.
    pub fn eval(&self, env: &Env) -> f64 {
        self.root.eval(env)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.source)
    }
}

/// Deserializes with every variable allowed; callers that need a narrower
/// set re-parse through [`Expr::parse`].
impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Expr::parse(&s, &[Var::T, Var::S, Var::X]).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl fmt::Display for TokKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokKind::Num(v) => write!(f, "{v}"),
            TokKind::Ident(s) => f.write_str(s),
            TokKind::Op(c) => write!(f, "{c}"),
            TokKind::LParen => f.write_str("("),
            TokKind::RParen => f.write_str(")"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    offset: usize,
    /// Raw text, kept so integer exponents can be checked exactly.
    text: String,
}

fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let err = |message: String, offset: usize| ParseError {
        message,
        offset,
        source_text: source.to_string(),
    };
    let mut tokens = Vec::new();
    let mut chars = source.char_indices().peekable();
    while let Some(&(offset, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let mut text = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if d.is_ascii_digit() || d == '.' {
                    text.push(d);
                    chars.next();
                } else if (d == 'e' || d == 'E') && !text.contains(['e', 'E']) {
                    text.push(d);
                    chars.next();
                    if let Some(&(_, sign)) = chars.peek() {
                        if sign == '+' || sign == '-' {
                            text.push(sign);
                            chars.next();
                        }
                    }
                } else {
                    break;
                }
            }
            let value: f64 = text
                .parse()
                .map_err(|_| err(format!("malformed number `{text}`"), offset))?;
            tokens.push(Token {
                kind: TokKind::Num(value),
                offset,
                text,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut text = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    text.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            tokens.push(Token {
                kind: TokKind::Ident(text.clone()),
                offset,
                text,
            });
            continue;
        }
        let kind = match c {
            '+' | '*' | '/' | '^' => TokKind::Op(c),
            '-' | '\u{2212}' => TokKind::Op('-'),
            '(' => TokKind::LParen,
            ')' => TokKind::RParen,
            other => return Err(err(format!("unexpected character `{other}`"), offset)),
        };
        chars.next();
        tokens.push(Token {
            kind,
            offset,
            text: c.to_string(),
        });
    }
    Ok(tokens)
}

struct Parser<'a> {
    source: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    allowed: &'a [Var],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some(Token {
                kind: TokKind::Op(c), ..
            }) => Some(*c),
            _ => None,
        }
    }

    fn end_offset(&self) -> usize {
        self.source.len()
    }

    fn error(&self, message: String, offset: usize) -> ParseError {
        ParseError {
            message,
            offset,
            source_text: self.source.to_string(),
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Node::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Node::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let n = self.exponent()?;
            return Ok(Node::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let parenthesized = matches!(
            self.peek(),
            Some(Token {
                kind: TokKind::LParen,
                ..
            })
        );
        if parenthesized {
            self.pos += 1;
        }
        let negative = if self.peek_op() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| self.error("missing exponent".into(), self.end_offset()))?;
        let magnitude: i32 = match tok.kind {
            TokKind::Num(_) => tok
                .text
                .parse()
                .map_err(|_| self.error(format!("exponent `{}` is not an integer", tok.text), tok.offset))?,
            _ => return Err(self.error("exponent must be an integer constant".into(), tok.offset)),
        };
        self.pos += 1;
        if parenthesized {
            self.expect_rparen()?;
        }
        Ok(if negative { -magnitude } else { magnitude })
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Token {
                kind: TokKind::RParen, ..
            }) => {
                self.pos += 1;
                Ok(())
            }
            Some(tok) => Err(self.error(format!("expected `)`, found `{}`", tok.kind), tok.offset)),
            None => Err(self.error("expected `)`".into(), self.end_offset())),
        }
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| self.error("unexpected end of expression".into(), self.end_offset()))?;
        self.pos += 1;
        match tok.kind {
            TokKind::Num(v) => Ok(Node::Num(v)),
            TokKind::Ident(name) => match Var::from_name(&name) {
                Some(var) if self.allowed.contains(&var) => Ok(Node::Var(var)),
                _ => {
                    let names: Vec<_> = self.allowed.iter().map(|v| v.name()).collect();
                    Err(self.error(
                        format!("unknown identifier `{name}` (allowed variables: {})", names.join(", ")),
                        tok.offset,
                    ))
                }
            },
            TokKind::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            other => Err(self.error(format!("unexpected `{other}`"), tok.offset)),
        }
    }
}
