//! Coefficient expressions for the command line.
//!
//! Grammar, with the usual precedence and left associativity:
//!
//! ```text
//! expr   = term   (('+' | '-') term)*
//! term   = unary  (('*' | '/') unary)*
//! unary  = '-' unary | atom
//! atom   = number | 'x' | 'y' | 't' | 'pi'
//!        | func '(' expr ')' | 'clamp' '(' expr ',' expr ',' expr ')'
//!        | '(' expr ')'
//! func   = 'sin' | 'cos' | 'exp' | 'abs'
//! ```
//!
//! `t` is the perturbation parameter; it is only meaningful in family
//! coefficients and is bound to a value before evaluation.

use std::fmt;
use std::sync::Arc;

use tresca_core::FieldFn;

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    X,
    Y,
    T,
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
    Clamp(Box<Node>, Box<Node>, Box<Node>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub source: String,
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "in expression `{}` at column {}: {}",
            self.source,
            self.position + 1,
            self.message
        )
    }
}

impl std::error::Error for ParseError {}

/// A parsed expression in `x`, `y` and `t`.
#[derive(Clone, Debug)]
pub struct Expr {
    root: Arc<Node>,
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        let mut p = Parser {
            src: text,
            bytes: text.as_bytes(),
            pos: 0,
        };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos < p.bytes.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(Expr { root: Arc::new(root) })
    }

    pub fn eval(&self, x: f64, y: f64, t: f64) -> f64 {
        eval(&self.root, x, y, t)
    }

    pub fn uses_t(&self) -> bool {
        uses_t(&self.root)
    }

    /// The field `(x, y) -> self(x, y, t)`.
    pub fn at(&self, t: f64) -> FieldFn {
        let root = self.root.clone();
        FieldFn::new(move |x, y| eval(&root, x, y, t))
    }
}

fn eval(n: &Node, x: f64, y: f64, t: f64) -> f64 {
    match n {
        Node::Num(v) => *v,
        Node::X => x,
        Node::Y => y,
        Node::T => t,
        Node::Neg(a) => -eval(a, x, y, t),
        Node::Bin(op, a, b) => {
            let (a, b) = (eval(a, x, y, t), eval(b, x, y, t));
            match op {
                Op::Add => a + b,
                Op::Sub => a - b,
                Op::Mul => a * b,
                Op::Div => a / b,
            }
        }
        Node::Call(f, a) => {
            let a = eval(a, x, y, t);
            match f {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Abs => a.abs(),
            }
        }
        Node::Clamp(v, lo, hi) => {
            let (lo, hi) = (eval(lo, x, y, t), eval(hi, x, y, t));
            // clamp panics on lo > hi; keep evaluation total
            eval(v, x, y, t).max(lo).min(hi)
        }
    }
}

fn uses_t(n: &Node) -> bool {
    match n {
        Node::T => true,
        Node::Num(_) | Node::X | Node::Y => false,
        Node::Neg(a) | Node::Call(_, a) => uses_t(a),
        Node::Bin(_, a, b) => uses_t(a) || uses_t(b),
        Node::Clamp(a, b, c) => uses_t(a) || uses_t(b) || uses_t(c),
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError {
            source: self.src.to_string(),
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let op = if c == b'+' { Op::Add } else { Op::Sub };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let op = if c == b'*' { Op::Mul } else { Op::Div };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of expression")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let word = &self.src[start..self.pos];
                let func = match word {
                    "x" => return Ok(Node::X),
                    "y" => return Ok(Node::Y),
                    "t" => return Ok(Node::T),
                    "pi" => return Ok(Node::Num(std::f64::consts::PI)),
                    "clamp" => {
                        self.expect(b'(')?;
                        let v = self.expr()?;
                        self.expect(b',')?;
                        let lo = self.expr()?;
                        self.expect(b',')?;
                        let hi = self.expr()?;
                        self.expect(b')')?;
                        return Ok(Node::Clamp(Box::new(v), Box::new(lo), Box::new(hi)));
                    }
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    "abs" => Func::Abs,
                    _ => {
                        self.pos = start;
                        return Err(self.error(&format!("unknown name `{word}`")));
                    }
                };
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(Node::Call(func, Box::new(arg)))
            }
            Some(c) => Err(self.error(&format!("unexpected `{}`", c as char))),
        }
    }

    fn number(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        let b = self.bytes;
        while self.pos < b.len() && (b[self.pos].is_ascii_digit() || b[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < b.len() && (b[self.pos] == b'e' || b[self.pos] == b'E') {
            let mut q = self.pos + 1;
            if q < b.len() && (b[q] == b'+' || b[q] == b'-') {
                q += 1;
            }
            if q < b.len() && b[q].is_ascii_digit() {
                while q < b.len() && b[q].is_ascii_digit() {
                    q += 1;
                }
                self.pos = q;
            }
        }
        self.src[start..self.pos].parse().map(Node::Num).map_err(|_| {
            self.pos = start;
            self.error("malformed number")
        })
    }
}
