use super::{BinaryOp, Expr, UnaryOp, Var};

/// `f` together with all of its partial derivatives up to order two.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialBundle {
    pub f: Expr,
    pub fx: Expr,
    pub fy: Expr,
    pub fxx: Expr,
    /// `∂y(∂x f)`, used for both mixed slots.
    pub fxy: Expr,
    pub fyy: Expr,
}

impl PartialBundle {
    pub fn new(f: Expr) -> Self {
        let fx = f.differentiate(Var::X);
        let fy = f.differentiate(Var::Y);
        let fxx = fx.differentiate(Var::X);
        let fxy = fx.differentiate(Var::Y);
        let fyy = fy.differentiate(Var::Y);
        PartialBundle {
            f,
            fx,
            fy,
            fxx,
            fxy,
            fyy,
        }
    }

    /// `Some((a, b))` when `f = a*x + b*y + const` with constant `a`, `b`.
    pub fn linear_coefficients(&self) -> Option<(f64, f64)> {
        if self.fxx.is_zero() && self.fxy.is_zero() && self.fyy.is_zero() {
            Some((self.fx.as_const()?, self.fy.as_const()?))
        } else {
            None
        }
    }
}

impl Expr {
    /// Exact symbolic derivative, simplified through the smart constructors.
    pub fn differentiate(&self, v: Var) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(w) => Expr::Const(if *w == v { 1.0 } else { 0.0 }),
            Expr::Unary(op, a) => {
                let da = a.differentiate(v);
                let inner = (**a).clone();
                match op {
                    UnaryOp::Neg => Expr::neg(da),
                    UnaryOp::Sin => Expr::mul(Expr::unary(UnaryOp::Cos, inner), da),
                    UnaryOp::Cos => Expr::neg(Expr::mul(Expr::unary(UnaryOp::Sin, inner), da)),
                    UnaryOp::Exp => Expr::mul(Expr::unary(UnaryOp::Exp, inner), da),
                    UnaryOp::Log => Expr::div(da, inner),
                }
            }
            Expr::Binary(op, a, b) => {
                let da = a.differentiate(v);
                let db = b.differentiate(v);
                let (a, b) = ((**a).clone(), (**b).clone());
                match op {
                    BinaryOp::Add => Expr::add(da, db),
                    BinaryOp::Sub => Expr::sub(da, db),
                    BinaryOp::Mul => Expr::add(Expr::mul(da, b), Expr::mul(a, db)),
                    BinaryOp::Div => {
                        if db.is_zero() {
                            Expr::div(da, b)
                        } else {
                            Expr::div(
                                Expr::sub(Expr::mul(da, b.clone()), Expr::mul(a, db)),
                                Expr::pow(b, 2.0),
                            )
                        }
                    }
                }
            }
            Expr::Pow(a, e) => {
                let da = a.differentiate(v);
                if da.is_zero() {
                    return Expr::Const(0.0);
                }
                // e - 1 is exact for every exponent produced by the grammar's
                // integer and dyadic literals; others round to nearest.
                let shifted = Expr::pow((**a).clone(), *e - 1.0);
                Expr::mul(Expr::mul(Expr::Const(*e), shifted), da)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    #[test]
    fn polynomial_derivative() {
        assert_eq!(p("x^2+y^2").differentiate(Var::X), Expr::mul(Expr::Const(2.0), Expr::x()));
    }

    #[test]
    fn chain_rule_through_sine() {
        let d = p("sin(-0.5*x*y)").differentiate(Var::Y);
        let expect = p("-0.5*x*cos(-0.5*x*y)");
        for &(x, y) in &[(0.3, 0.7), (1.0, 1.0), (0.0, 0.5)] {
            let a = d.eval_real(x, y).unwrap();
            let b = expect.eval_real(x, y).unwrap();
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn linear_function_derivative_is_one() {
        assert_eq!(p("x + 0.75*y").differentiate(Var::X), Expr::Const(1.0));
    }

    #[test]
    fn bundles() {
        let b = PartialBundle::new(p("x+0.5*y"));
        assert_eq!(b.fx, Expr::Const(1.0));
        assert_eq!(b.fy, Expr::Const(0.5));
        assert!(b.fxx.is_zero() && b.fxy.is_zero() && b.fyy.is_zero());
        assert_eq!(b.linear_coefficients(), Some((1.0, 0.5)));

        let b = PartialBundle::new(p("x^2+y^2+6*x+3*y+0.5*x*y"));
        assert_eq!(b.fxx, Expr::Const(2.0));
        assert_eq!(b.fyy, Expr::Const(2.0));
        assert_eq!(b.fxy, Expr::Const(0.5));

        let b = PartialBundle::new(p("x*y"));
        assert_eq!(b.fx, Expr::y());
        assert_eq!(b.fy, Expr::x());
        assert_eq!(b.fxy, Expr::Const(1.0));
    }

    #[test]
    fn absorption_keeps_domains() {
        // d/dx of log(y)*x keeps log(y) even though d/dx log(y) = 0
        let d = p("log(y)*x").differentiate(Var::X);
        assert!(d.eval_real(1.0, -1.0).is_err());
        let d = p("x/y").differentiate(Var::X);
        assert!(d.eval_real(1.0, 0.0).is_err());
    }
}
