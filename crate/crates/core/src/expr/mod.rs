//! Expression trees for functions `f(x, y)`.
//!
//! Grammar: numeric literals, `x`, `y`, `+ - * / ^`, calls to `sin cos exp
//! log`, parentheses. `^` binds tighter than unary minus, which binds tighter
//! than `* /`, then `+ -`. `^` is right-associative and its exponent must be
//! a constant. Numeric literals denote the nearest binary64 value.

mod diff;
mod eval;
mod parse;

use std::fmt;

pub use diff::PartialBundle;
pub use eval::EvalError;
pub use parse::{ParseError, ParseErrorKind};

use crate::interval::{add_down, add_up, div_down, div_up, mul_down, mul_up};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// Power with a constant exponent.
    Pow(Box<Expr>, f64),
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::parse(s)
    }
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn parse(source: &str) -> Result<Expr, ParseError> {
        parse::parse(source)
    }

    pub fn x() -> Expr {
        Expr::Var(Var::X)
    }

    pub fn y() -> Expr {
        Expr::Var(Var::Y)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    pub fn depends_on(&self, v: Var) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(w) => *w == v,
            Expr::Unary(_, a) | Expr::Pow(a, _) => a.depends_on(v),
            Expr::Binary(_, a, b) => a.depends_on(v) || b.depends_on(v),
        }
    }

    /// True when the expression is defined at every point of the plane, so
    /// absorbing it (e.g. `0*e -> 0`) cannot change a domain.
    pub fn is_total(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => true,
            Expr::Unary(UnaryOp::Log, _) => false,
            Expr::Unary(_, a) => a.is_total(),
            Expr::Binary(BinaryOp::Div, _, _) => false,
            Expr::Binary(_, a, b) => a.is_total() && b.is_total(),
            Expr::Pow(a, e) => *e >= 0.0 && e.fract() == 0.0 && a.is_total(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Unary(_, a) | Expr::Pow(a, _) => 1 + a.node_count(),
            Expr::Binary(_, a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    // Smart constructors with conservative simplification. Constants are only
    // folded when the floating result is exact, and absorption never drops a
    // subtree that could raise a domain error.

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(v) => Expr::Const(-v),
            Expr::Unary(UnaryOp::Neg, inner) => *inner,
            a => Expr::Unary(UnaryOp::Neg, Box::new(a)),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        if let (Some(p), Some(q)) = (a.as_const(), b.as_const()) {
            if add_down(p, q) == add_up(p, q) {
                return Expr::Const(p + q);
            }
        }
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        Expr::Binary(BinaryOp::Add, Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        if let (Some(p), Some(q)) = (a.as_const(), b.as_const()) {
            if add_down(p, -q) == add_up(p, -q) {
                return Expr::Const(p - q);
            }
        }
        if b.is_zero() {
            return a;
        }
        if a.is_zero() {
            return Expr::neg(b);
        }
        Expr::Binary(BinaryOp::Sub, Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if let (Some(p), Some(q)) = (a.as_const(), b.as_const()) {
            if mul_down(p, q) == mul_up(p, q) {
                return Expr::Const(p * q);
            }
        }
        if (a.is_zero() && b.is_total()) || (b.is_zero() && a.is_total()) {
            return Expr::Const(0.0);
        }
        if a.is_one() {
            return b;
        }
        if b.is_one() {
            return a;
        }
        if a.as_const() == Some(-1.0) {
            return Expr::neg(b);
        }
        if b.as_const() == Some(-1.0) {
            return Expr::neg(a);
        }
        Expr::Binary(BinaryOp::Mul, Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if let (Some(p), Some(q)) = (a.as_const(), b.as_const()) {
            if q != 0.0 && div_down(p, q) == div_up(p, q) {
                return Expr::Const(p / q);
            }
        }
        if b.is_one() {
            return a;
        }
        Expr::Binary(BinaryOp::Div, Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, e: f64) -> Expr {
        if e == 1.0 {
            return a;
        }
        if e == 0.0 && a.is_total() {
            return Expr::Const(1.0);
        }
        Expr::Pow(Box::new(a), e)
    }

    pub fn unary(op: UnaryOp, a: Expr) -> Expr {
        match (op, a.as_const()) {
            (UnaryOp::Neg, _) => Expr::neg(a),
            (UnaryOp::Sin, Some(0.0)) => Expr::Const(0.0),
            (UnaryOp::Cos, Some(0.0)) => Expr::Const(1.0),
            (UnaryOp::Exp, Some(0.0)) => Expr::Const(1.0),
            (UnaryOp::Log, Some(1.0)) => Expr::Const(0.0),
            _ => Expr::Unary(op, Box::new(a)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinaryOp::Add | BinaryOp::Sub, _, _) => 1,
            Expr::Binary(BinaryOp::Mul | BinaryOp::Div, _, _) => 2,
            Expr::Unary(UnaryOp::Neg, _) => 3,
            Expr::Const(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => 3,
            Expr::Pow(_, _) => 4,
            _ => 5,
        }
    }
}

impl UnaryOp {
    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
        }
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v == 0.0 && v.is_sign_negative() {
        // keep the sign of zero through a round trip
        return write!(f, "-0");
    }
    write!(f, "{v}")
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => write_const(f, *v),
            Expr::Var(Var::X) => write!(f, "x"),
            Expr::Var(Var::Y) => write!(f, "y"),
            Expr::Unary(UnaryOp::Neg, a) => {
                write!(f, "-")?;
                // `-c` for a literal c would re-parse as a negative constant
                let paren = a.precedence() < 4 || matches!(**a, Expr::Const(_));
                write_operand(f, a, paren)
            }
            Expr::Unary(op, a) => write!(f, "{}({a})", op.name()),
            Expr::Binary(op, a, b) => {
                let p = self.precedence();
                write_operand(f, a, a.precedence() < p)?;
                let sym = match op {
                    BinaryOp::Add => " + ",
                    BinaryOp::Sub => " - ",
                    BinaryOp::Mul => "*",
                    BinaryOp::Div => "/",
                };
                write!(f, "{sym}")?;
                write_operand(f, b, b.precedence() <= p)
            }
            Expr::Pow(a, e) => {
                write_operand(f, a, a.precedence() < 5)?;
                write!(f, "^")?;
                if *e < 0.0 || (*e == 0.0 && e.is_sign_negative()) {
                    write!(f, "(")?;
                    write_const(f, *e)?;
                    write!(f, ")")
                } else {
                    write_const(f, *e)
                }
            }
        }
    }
}
