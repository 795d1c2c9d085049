use thiserror::Error;

use super::{BinaryOp, Expr, UnaryOp, Var};
use crate::interval::{Interval, IntervalError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("logarithm of non-positive value {0}")]
    LogDomain(f64),
    #[error("{base}^{exponent} is undefined")]
    PowDomain { base: f64, exponent: f64 },
    #[error("non-finite result")]
    NonFinite,
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

fn finite(v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}

fn real_pow(b: f64, e: f64) -> Result<f64, EvalError> {
    if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
        if b == 0.0 && e < 0.0 {
            return Err(EvalError::PowDomain { base: b, exponent: e });
        }
        return finite(b.powi(e as i32));
    }
    if b < 0.0 || (b == 0.0 && e < 0.0) {
        return Err(EvalError::PowDomain { base: b, exponent: e });
    }
    finite(b.powf(e))
}

impl Expr {
    /// Point evaluation. Domain violations are reported instead of producing NaN.
    pub fn eval_real(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        match self {
            Expr::Const(v) => Ok(*v),
            Expr::Var(Var::X) => Ok(x),
            Expr::Var(Var::Y) => Ok(y),
            Expr::Unary(op, a) => {
                let a = a.eval_real(x, y)?;
                match op {
                    UnaryOp::Neg => Ok(-a),
                    UnaryOp::Sin => Ok(a.sin()),
                    UnaryOp::Cos => Ok(a.cos()),
                    UnaryOp::Exp => finite(a.exp()),
                    UnaryOp::Log if a > 0.0 => Ok(a.ln()),
                    UnaryOp::Log => Err(EvalError::LogDomain(a)),
                }
            }
            Expr::Binary(op, a, b) => {
                let a = a.eval_real(x, y)?;
                let b = b.eval_real(x, y)?;
                match op {
                    BinaryOp::Add => finite(a + b),
                    BinaryOp::Sub => finite(a - b),
                    BinaryOp::Mul => finite(a * b),
                    BinaryOp::Div if b == 0.0 => Err(EvalError::DivisionByZero),
                    BinaryOp::Div => finite(a / b),
                }
            }
            Expr::Pow(a, e) => real_pow(a.eval_real(x, y)?, *e),
        }
    }

    /// Rigorous enclosure of the range of the expression over the box `xs × ys`.
    pub fn eval_interval(&self, xs: Interval, ys: Interval) -> Result<Interval, EvalError> {
        Ok(match self {
            Expr::Const(v) => Interval::point(*v),
            Expr::Var(Var::X) => xs,
            Expr::Var(Var::Y) => ys,
            Expr::Unary(op, a) => {
                let a = a.eval_interval(xs, ys)?;
                match op {
                    UnaryOp::Neg => a.neg(),
                    UnaryOp::Sin => a.sin()?,
                    UnaryOp::Cos => a.cos()?,
                    UnaryOp::Exp => a.exp()?,
                    UnaryOp::Log => a.ln()?,
                }
            }
            Expr::Binary(op, a, b) => {
                let a = a.eval_interval(xs, ys)?;
                let b = b.eval_interval(xs, ys)?;
                match op {
                    BinaryOp::Add => a.add(b)?,
                    BinaryOp::Sub => a.sub(b)?,
                    BinaryOp::Mul => a.mul(b)?,
                    BinaryOp::Div => a.div(b)?,
                }
            }
            Expr::Pow(a, e) => {
                let a = a.eval_interval(xs, ys)?;
                if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
                    a.powi(*e as i32)?
                } else {
                    a.powf(*e)?
                }
            }
        })
    }
}
