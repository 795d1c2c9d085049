//! Depth-first interval branch-and-bound.
//!
//! Boxes are explored in a fixed order (lower half first, wider side split
//! first), so the verdict and the witness are deterministic.

use num_rational::BigRational;

use super::{Budget, ConditionReport, DomainSpec, Stats, Status, Witness};
use crate::expr::{EvalError, Expr};
use crate::interval::Interval;
use crate::param::enclose;

/// `coef * expr`, with the coefficient enclosed from an exact rational.
pub(crate) struct Term<'a> {
    pub coef: Interval,
    pub expr: &'a Expr,
}

impl<'a> Term<'a> {
    pub fn new(coef: &BigRational, expr: &'a Expr) -> Self {
        Term {
            coef: enclose(coef),
            expr,
        }
    }
}

/// `sum_i coef_i * expr_i >= 0`.
pub(crate) struct Inequality<'a> {
    pub id: String,
    pub description: String,
    pub terms: Vec<Term<'a>>,
}

fn enclosure(terms: &[Term], x: Interval, y: Interval) -> Result<Interval, EvalError> {
    let mut acc = Interval::point(0.0);
    for t in terms {
        if t.coef == Interval::point(0.0) {
            continue;
        }
        acc = acc.add(t.coef.mul(t.expr.eval_interval(x, y)?)?)?;
    }
    Ok(acc)
}

fn split(x: Interval, y: Interval) -> [(Interval, Interval); 2] {
    if x.width() >= y.width() {
        let (a, b) = x.bisect();
        [(a, y), (b, y)]
    } else {
        let (a, b) = y.bisect();
        [(x, a), (x, b)]
    }
}

fn probes(x: Interval, y: Interval) -> [(f64, f64); 5] {
    [
        (x.mid(), y.mid()),
        (x.lo(), y.lo()),
        (x.hi(), y.lo()),
        (x.lo(), y.hi()),
        (x.hi(), y.hi()),
    ]
}

fn point_box(p: (f64, f64)) -> (Interval, Interval) {
    (Interval::point(p.0), Interval::point(p.1))
}

struct Run<'a> {
    id: &'a str,
    description: &'a str,
    stats: Stats,
    undecided: Option<Witness>,
}

impl<'a> Run<'a> {
    fn new(id: &'a str, description: &'a str) -> Self {
        Run {
            id,
            description,
            stats: Stats::default(),
            undecided: None,
        }
    }

    fn witness(&self, b: (Interval, Interval), enclosure: Option<Interval>, reason: String) -> Witness {
        Witness {
            condition: self.id.to_string(),
            x: b.0,
            y: b.1,
            enclosure,
            reason,
        }
    }

    fn finish(self, status: Status, witness: Option<Witness>) -> ConditionReport {
        let (status, witness) = match (status, witness) {
            (Status::Certified, _) if self.undecided.is_some() => (Status::Unknown, self.undecided),
            other => other,
        };
        ConditionReport {
            id: self.id.to_string(),
            description: self.description.to_string(),
            status,
            witness,
            stats: self.stats,
        }
    }

    /// Counts a box; `Err` once the budget is spent.
    fn visit(&mut self, depth: u32, budget: &Budget) -> Result<(), ()> {
        self.stats.boxes += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        if self.stats.boxes > budget.boxes {
            Err(())
        } else {
            Ok(())
        }
    }
}

/// Proves the inequality on every box of `dom` or finds where it fails.
pub(crate) fn prove_nonneg(ineq: &Inequality, dom: &DomainSpec, budget: &Budget) -> ConditionReport {
    let mut run = Run::new(&ineq.id, &ineq.description);
    let mut stack: Vec<(Interval, Interval, u32)> =
        dom.boxes().iter().rev().map(|&(x, y)| (x, y, 0)).collect();
    while let Some((x, y, depth)) = stack.pop() {
        if run.visit(depth, budget).is_err() {
            let w = run.witness((x, y), None, "subdivision budget exhausted".into());
            return run.finish(Status::Unknown, Some(w));
        }
        match enclosure(&ineq.terms, x, y) {
            Ok(e) if e.lo() >= 0.0 => continue,
            Ok(e) if e.hi() < 0.0 => {
                let w = run.witness((x, y), Some(e), "enclosure is negative on the whole box".into());
                return run.finish(Status::ConditionsViolated, Some(w));
            }
            _ => {}
        }
        let c = point_box((x.mid(), y.mid()));
        match enclosure(&ineq.terms, c.0, c.1) {
            Ok(e) if e.hi() < 0.0 => {
                let w = run.witness(c, Some(e), "negative at a point".into());
                return run.finish(Status::ConditionsViolated, Some(w));
            }
            Err(err) => {
                let w = run.witness(c, None, format!("undefined at a point: {err}"));
                return run.finish(Status::ConditionsViolated, Some(w));
            }
            Ok(_) => {}
        }
        if depth >= budget.depth {
            if run.undecided.is_none() {
                run.undecided = Some(run.witness((x, y), None, "depth limit reached".into()));
            }
            continue;
        }
        let [lo, hi] = split(x, y);
        stack.push((hi.0, hi.1, depth + 1));
        stack.push((lo.0, lo.1, depth + 1));
    }
    run.finish(Status::Certified, None)
}

/// Proves `expr` is strictly sign-definite on `dom`. Returns the report and,
/// when certified, whether the sign is positive.
pub(crate) fn prove_strict_sign(
    id: &str,
    description: &str,
    expr: &Expr,
    dom: &DomainSpec,
    budget: &Budget,
) -> (ConditionReport, Option<bool>) {
    let mut run = Run::new(id, description);
    let terms = [Term {
        coef: Interval::point(1.0),
        expr,
    }];
    // sign established so far, with the box or point that established it
    let mut known: Option<(bool, (Interval, Interval))> = None;
    let mut stack: Vec<(Interval, Interval, u32)> =
        dom.boxes().iter().rev().map(|&(x, y)| (x, y, 0)).collect();

    macro_rules! conflict {
        ($b:expr, $e:expr, $positive:expr) => {
            if let Some((s, other)) = known {
                if s != $positive {
                    let w = run.witness(
                        $b,
                        Some($e),
                        format!(
                            "sign differs from [{}, {}] x [{}, {}], so the partial is not sign-definite",
                            other.0.lo(),
                            other.0.hi(),
                            other.1.lo(),
                            other.1.hi()
                        ),
                    );
                    return (run.finish(Status::ConditionsViolated, Some(w)), None);
                }
            } else {
                known = Some(($positive, $b));
            }
        };
    }

    while let Some((x, y, depth)) = stack.pop() {
        if run.visit(depth, budget).is_err() {
            let w = run.witness((x, y), None, "subdivision budget exhausted".into());
            return (run.finish(Status::Unknown, Some(w)), None);
        }
        if let Ok(e) = enclosure(&terms, x, y) {
            if e.lo() > 0.0 || e.hi() < 0.0 {
                conflict!((x, y), e, e.lo() > 0.0);
                continue;
            }
        }
        for p in probes(x, y) {
            let b = point_box(p);
            match enclosure(&terms, b.0, b.1) {
                Err(err) => {
                    let w = run.witness(b, None, format!("undefined at a point: {err}"));
                    return (run.finish(Status::ConditionsViolated, Some(w)), None);
                }
                Ok(e) if e.lo() == 0.0 && e.hi() == 0.0 => {
                    let w = run.witness(b, Some(e), "vanishes at a point".into());
                    return (run.finish(Status::ConditionsViolated, Some(w)), None);
                }
                Ok(e) if e.lo() > 0.0 || e.hi() < 0.0 => {
                    conflict!(b, e, e.lo() > 0.0);
                }
                Ok(_) => {}
            }
        }
        if depth >= budget.depth {
            if run.undecided.is_none() {
                run.undecided = Some(run.witness((x, y), None, "depth limit reached".into()));
            }
            continue;
        }
        let [lo, hi] = split(x, y);
        stack.push((hi.0, hi.1, depth + 1));
        stack.push((lo.0, lo.1, depth + 1));
    }
    let sign = if run.undecided.is_none() {
        known.map(|(s, _)| s)
    } else {
        None
    };
    (run.finish(Status::Certified, None), sign)
}
