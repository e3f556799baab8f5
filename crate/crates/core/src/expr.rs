//! Expressions for user-supplied section functions.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | 'x' | 'y' | 'z' | func '(' expr ')' | '(' expr ')'
//! func    := 'exp' | 'sin' | 'cos'
//! ```
//!
//! `^` binds tighter than unary minus (`-x^2 = -(x^2)`) and is right
//! associative; the other binary operators are left associative. A minus
//! applied directly to a numeric literal is folded into the constant.

use std::fmt;

use thiserror::Error;

/// Denominators smaller than this in magnitude are rejected.
pub const MIN_DENOMINATOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    fn name(self) -> char {
        match self {
            Var::X => 'x',
            Var::Y => 'y',
            Var::Z => 'z',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Exp => v.exp(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("division by {0:e}")]
    DivisionByZero(f64),
}

impl Expr {
    pub fn eval(&self, x: f64, y: f64, z: f64) -> Result<f64, EvalError> {
        let ev = |e: &Expr| e.eval(x, y, z);
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::Y) => y,
            Expr::Var(Var::Z) => z,
            Expr::Neg(e) => -ev(e)?,
            Expr::Add(l, r) => ev(l)? + ev(r)?,
            Expr::Sub(l, r) => ev(l)? - ev(r)?,
            Expr::Mul(l, r) => ev(l)? * ev(r)?,
            Expr::Div(l, r) => {
                let d = ev(r)?;
                if d.abs() < MIN_DENOMINATOR {
                    return Err(EvalError::DivisionByZero(d));
                }
                ev(l)? / d
            }
            Expr::Pow(l, r) => ev(l)?.powf(ev(r)?),
            Expr::Call(f, e) => f.apply(ev(e)?),
        })
    }

    pub fn uses(&self, var: Var) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(e) | Expr::Call(_, e) => e.uses(var),
            Expr::Add(l, r)
            | Expr::Sub(l, r)
            | Expr::Mul(l, r)
            | Expr::Div(l, r)
            | Expr::Pow(l, r) => l.uses(var) || r.uses(var),
        }
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized; re-parses to an equal tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => {
                write!(f, "({c:?})")
            }
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Add(l, r) => write!(f, "({l} + {r})"),
            Expr::Sub(l, r) => write!(f, "({l} - {r})"),
            Expr::Mul(l, r) => write!(f, "({l} * {r})"),
            Expr::Div(l, r) => write!(f, "({l} / {r})"),
            Expr::Pow(l, r) => write!(f, "({l} ^ {r})"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the input; the input length for unexpected end.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("syntax error: unexpected {0}")]
    Unexpected(String),
    #[error("syntax error: unexpected end of input")]
    UnexpectedEnd,
    #[error("invalid number `{0}`")]
    InvalidNumber(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("variable `{0}` is not allowed here")]
    ArityViolation(char),
    #[error("base-point constraint violated: value {0} at the origin")]
    BasePoint(f64),
    #[error("expression cannot be evaluated at the origin: {0}")]
    Eval(EvalError),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        while let Some(t) = lx.next_token()? {
            out.push(t);
        }
        Ok(out)
    }

    fn peek_byte(&self, off: usize) -> Option<u8> {
        self.src.as_bytes().get(self.pos + off).copied()
    }

    fn next_token(&mut self) -> Result<Option<(Tok, usize)>, ParseError> {
        while self.peek_byte(0).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(b) = self.peek_byte(0) else {
            return Ok(None);
        };
        if b.is_ascii_digit() || b == b'.' {
            while self
                .peek_byte(0)
                .is_some_and(|c| c.is_ascii_digit() || c == b'.')
            {
                self.pos += 1;
            }
            if matches!(self.peek_byte(0), Some(b'e' | b'E')) {
                let sign = matches!(self.peek_byte(1), Some(b'+' | b'-')) as usize;
                if self.peek_byte(1 + sign).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1 + sign;
                    while self.peek_byte(0).is_some_and(|c| c.is_ascii_digit()) {
                        self.pos += 1;
                    }
                }
            }
            let text = &self.src[start..self.pos];
            let v: f64 = text.parse().map_err(|_| ParseError {
                kind: ParseErrorKind::InvalidNumber(text.to_string()),
                position: start,
            })?;
            return Ok(Some((Tok::Num(v), start)));
        }
        if b.is_ascii_alphabetic() || b == b'_' {
            while self
                .peek_byte(0)
                .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
            {
                self.pos += 1;
            }
            return Ok(Some((
                Tok::Ident(self.src[start..self.pos].to_string()),
                start,
            )));
        }
        if b"+-*/^()".contains(&b) {
            self.pos += 1;
            return Ok(Some((Tok::Op(b as char), start)));
        }
        let ch = self.src[start..].chars().next().unwrap_or('?');
        Err(ParseError {
            kind: ParseErrorKind::Unexpected(format!("character `{ch}`")),
            position: start,
        })
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    end: usize,
    allowed: &'a [Var],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn position(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(_, p)| *p)
    }

    fn error_here(&self) -> ParseError {
        match self.toks.get(self.idx) {
            None => ParseError {
                kind: ParseErrorKind::UnexpectedEnd,
                position: self.end,
            },
            Some((t, p)) => {
                let what = match t {
                    Tok::Num(v) => format!("number {v}"),
                    Tok::Ident(s) => format!("identifier `{s}`"),
                    Tok::Op(c) => format!("`{c}`"),
                };
                ParseError {
                    kind: ParseErrorKind::Unexpected(what),
                    position: *p,
                }
            }
        }
    }

    fn eat_op(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_op('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_op('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_op('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_op('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_op('-') {
            return Ok(match self.unary()? {
                Expr::Const(c) => Expr::Const(-c),
                e => Expr::Neg(Box::new(e)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat_op('^') {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.position();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.idx += 1;
                Ok(Expr::Const(v))
            }
            Some(Tok::Op('(')) => {
                self.idx += 1;
                let e = self.expr()?;
                if !self.eat_op(')') {
                    return Err(self.error_here());
                }
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.idx += 1;
                let var = match name.as_str() {
                    "x" => Some(Var::X),
                    "y" => Some(Var::Y),
                    "z" => Some(Var::Z),
                    _ => None,
                };
                if let Some(v) = var {
                    if !self.allowed.contains(&v) {
                        return Err(ParseError {
                            kind: ParseErrorKind::ArityViolation(v.name()),
                            position: pos,
                        });
                    }
                    return Ok(Expr::Var(v));
                }
                let func = match name.as_str() {
                    "exp" => Func::Exp,
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    _ => {
                        return Err(ParseError {
                            kind: ParseErrorKind::UnknownIdentifier(name),
                            position: pos,
                        })
                    }
                };
                if !self.eat_op('(') {
                    return Err(self.error_here());
                }
                let arg = self.expr()?;
                if !self.eat_op(')') {
                    return Err(self.error_here());
                }
                Ok(Expr::Call(func, Box::new(arg)))
            }
            _ => Err(self.error_here()),
        }
    }
}

/// Parses `text` allowing only the listed variables. No base-point check.
pub fn parse(text: &str, allowed: &[Var]) -> Result<Expr, ParseError> {
    let toks = Lexer::tokens(text)?;
    if toks.is_empty() {
        return Err(ParseError {
            kind: ParseErrorKind::Empty,
            position: 0,
        });
    }
    let mut p = Parser {
        toks,
        idx: 0,
        end: text.len(),
        allowed,
    };
    let e = p.expr()?;
    if p.idx < p.toks.len() {
        return Err(p.error_here());
    }
    Ok(e)
}

/// Absolute tolerance for the value at the origin.
pub const BASE_POINT_TOL: f64 = 1e-12;

/// Parses a section function and checks that it vanishes at the origin.
pub fn parse_function_expr(text: &str, allowed: &[Var]) -> Result<Expr, ParseError> {
    let e = parse(text, allowed)?;
    let at_origin = e.eval(0.0, 0.0, 0.0).map_err(|err| ParseError {
        kind: ParseErrorKind::Eval(err),
        position: 0,
    })?;
    if at_origin.is_nan() || at_origin.abs() > BASE_POINT_TOL {
        return Err(ParseError {
            kind: ParseErrorKind::BasePoint(at_origin),
            position: 0,
        });
    }
    Ok(e)
}
