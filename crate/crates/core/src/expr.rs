//! Scalar expression trees.
//!
//! Objectives, constraints and closed-form oracle formulas are stored as
//! data so that problems can be loaded from JSON and printed back. The
//! grammar is plain infix arithmetic:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | ident | 'max' '(' expr ',' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right associative and binds tighter than unary minus, so `-x1^2`
//! is `-(x1^2)`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Max(Box<Node>, Box<Node>),
}

/// Evaluation failure at a specific point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainError {
    DivisionByZero,
    NegativeBase,
    NonFinite,
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainError::DivisionByZero => write!(f, "division by zero"),
            DomainError::NegativeBase => write!(f, "non-integer power of a negative base"),
            DomainError::NonFinite => write!(f, "non-finite intermediate value"),
        }
    }
}

impl Node {
    pub fn eval(&self, vars: &[f64]) -> std::result::Result<f64, DomainError> {
        let v = match self {
            Node::Const(c) => *c,
            Node::Var(i) => vars[*i],
            Node::Neg(a) => -a.eval(vars)?,
            Node::Add(a, b) => a.eval(vars)? + b.eval(vars)?,
            Node::Sub(a, b) => a.eval(vars)? - b.eval(vars)?,
            Node::Mul(a, b) => a.eval(vars)? * b.eval(vars)?,
            Node::Div(a, b) => {
                let num = a.eval(vars)?;
                let den = b.eval(vars)?;
                if den == 0.0 {
                    return Err(DomainError::DivisionByZero);
                }
                num / den
            }
            Node::Pow(a, b) => {
                let base = a.eval(vars)?;
                let exp = b.eval(vars)?;
                if exp.fract() == 0.0 && exp.abs() <= 64.0 {
                    if exp < 0.0 && base == 0.0 {
                        return Err(DomainError::DivisionByZero);
                    }
                    base.powi(exp as i32)
                } else {
                    if base < 0.0 {
                        return Err(DomainError::NegativeBase);
                    }
                    base.powf(exp)
                }
            }
            Node::Max(a, b) => a.eval(vars)?.max(b.eval(vars)?),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(DomainError::NonFinite)
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Node::Const(_) => None,
            Node::Var(i) => Some(*i),
            Node::Neg(a) => a.max_var(),
            Node::Add(a, b)
            | Node::Sub(a, b)
            | Node::Mul(a, b)
            | Node::Div(a, b)
            | Node::Pow(a, b)
            | Node::Max(a, b) => match (a.max_var(), b.max_var()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }
}

/// A parsed expression together with its source text.
///
/// Variables are `<prefix>1 .. <prefix>k`; the prefix is `x` for decision
/// variables and `xi` for weight coordinates.
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
    /// Parses an expression over decision variables `x1..x{arity}`.
    pub fn parse(source: &str, arity: usize) -> Result<Self> {
        Self::parse_with_prefix(source, "x", arity)
    }

    /// Parses an expression over weight coordinates `xi1..xi{arity}`.
    pub fn parse_weight(source: &str, arity: usize) -> Result<Self> {
        Self::parse_with_prefix(source, "xi", arity)
    }

    pub fn parse_with_prefix(source: &str, prefix: &str, arity: usize) -> Result<Self> {
        let tokens = tokenize(source)?;
        let mut p = Parser {
            tokens,
            pos: 0,
            prefix,
            arity,
            source,
        };
        let root = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(p.error("trailing input"));
        }
        Ok(Expr {
            source: source.trim().to_string(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn eval(&self, vars: &[f64]) -> std::result::Result<f64, DomainError> {
        self.root.eval(vars)
    }

    /// Number of variables the expression actually references (highest index + 1).
    pub fn referenced_arity(&self) -> usize {
        self.root.max_var().map_or(0, |i| i + 1)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        // Without context we accept any x-indexed variable; callers re-check arity.
        let s = String::deserialize(d)?;
        Expr::parse(&s, usize::MAX).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let save = i;
                i += 1;
                if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                    i += 1;
                }
                if i < bytes.len() && bytes[i].is_ascii_digit() {
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| Error::Parse {
                input: src.to_string(),
                position: start,
                message: format!("bad number `{text}`"),
            })?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if "+-*/^(),".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err(Error::Parse {
                input: src.to_string(),
                position: i,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    prefix: &'a str,
    arity: usize,
    source: &'a str,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        let position = self
            .tokens
            .get(self.pos)
            .map_or(self.source.len(), |(_, p)| *p);
        Error::Parse {
            input: self.source.to_string(),
            position,
            message: message.to_string(),
        }
    }

    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some((Tok::Op(c), _)) => Some(*c),
            _ => None,
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.peek_op() == Some(op) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{op}`")))
        }
    }

    fn expr(&mut self) -> Result<Node> {
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

    fn term(&mut self) -> Result<Node> {
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

    fn unary(&mut self) -> Result<Node> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.peek_op() == Some('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        let Some((tok, _)) = self.tokens.get(self.pos).cloned() else {
            return Err(self.error("unexpected end of input"));
        };
        match tok {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Node::Const(v))
            }
            Tok::Op('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Tok::Ident(name) if name == "max" => {
                self.pos += 1;
                self.expect('(')?;
                let a = self.expr()?;
                self.expect(',')?;
                let b = self.expr()?;
                self.expect(')')?;
                Ok(Node::Max(Box::new(a), Box::new(b)))
            }
            Tok::Ident(name) => {
                let index = name
                    .strip_prefix(self.prefix)
                    .and_then(|rest| rest.parse::<usize>().ok())
                    .filter(|&k| k >= 1 && k <= self.arity)
                    .ok_or_else(|| self.error(&format!("unknown identifier `{name}`")))?;
                self.pos += 1;
                Ok(Node::Var(index - 1))
            }
            Tok::Op(c) => Err(self.error(&format!("unexpected `{c}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, x: &[f64]) -> f64 {
        Expr::parse(src, x.len()).unwrap().eval(x).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", &[]), 7.0);
        assert_eq!(ev("2 ^ 3 ^ 2", &[]), 512.0);
        assert_eq!(ev("-x1^2", &[3.0]), -9.0);
        assert_eq!(ev("(1 - x1) / x2", &[0.25, 0.5]), 1.5);
        assert_eq!(ev("max(x1, -x2)", &[-1.0, -2.0]), 2.0);
        assert_eq!(ev("1e-3 * 2", &[]), 0.002);
    }

    #[test]
    fn quartic_objectives() {
        assert_eq!(ev("x1^4 - 2*x2", &[1.0, 1.0]), -1.0);
        assert_eq!(ev("-2*x1^2 + x2^2", &[1.0, 1.0]), -1.0);
    }

    #[test]
    fn domain_errors() {
        let e = Expr::parse("1 / (x1 - 1)", 1).unwrap();
        assert_eq!(e.eval(&[1.0]), Err(DomainError::DivisionByZero));
        let e = Expr::parse("x1 ^ 0.5", 1).unwrap();
        assert_eq!(e.eval(&[-4.0]), Err(DomainError::NegativeBase));
        assert_eq!(e.eval(&[4.0]), Ok(2.0));
    }

    #[test]
    fn rejects_unknown_variables_and_garbage() {
        assert!(Expr::parse("x3 + 1", 2).is_err());
        assert!(Expr::parse("x0", 2).is_err());
        assert!(Expr::parse("y1", 2).is_err());
        assert!(Expr::parse("1 +", 2).is_err());
        assert!(Expr::parse("(x1", 2).is_err());
        assert!(Expr::parse("x1 $ 2", 2).is_err());
        assert!(Expr::parse("max(x1)", 2).is_err());
    }

    #[test]
    fn weight_prefix() {
        let e = Expr::parse_weight("(1 - xi1) / xi1", 2).unwrap();
        assert_eq!(e.eval(&[0.5, 0.5]).unwrap(), 1.0);
        assert!(Expr::parse_weight("x1", 2).is_err());
    }

    #[test]
    fn referenced_arity() {
        assert_eq!(Expr::parse("x2 + 1", 5).unwrap().referenced_arity(), 2);
        assert_eq!(Expr::parse("3", 5).unwrap().referenced_arity(), 0);
    }
}
