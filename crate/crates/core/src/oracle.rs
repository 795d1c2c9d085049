//! Brute-force under-approximation of `f(E1, E2)` from points that are known
//! to lie in the sets.
//!
//! For an IFS every `f_w(0)` and `f_w(1)` lies in the attractor, since 0 and 1
//! are in it; for a Moran realization the endpoints of level-`k` basic
//! intervals survive into every deeper level by endpoint pinning. Evaluating
//! `f` on pairs of such points therefore gives genuine members of the image.

use serde::Serialize;
use thiserror::Error;

use crate::expr::{EvalError, Expr};
use crate::fractal::{FractalError, Source};
use crate::interval::Interval;
use crate::interval_set::{IntervalSet, SetError};

/// Cap on sample points per set and on evaluated pairs.
pub const MAX_POINTS: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Fractal(#[from] FractalError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("{0} sample points exceed the cap of {MAX_POINTS}")]
    TooManyPoints(u128),
}

/// Sorted, deduplicated endpoints of the level-`depth` intervals.
pub fn sample_points(source: Source, depth: usize) -> Result<Vec<f64>, OracleError> {
    let intervals = source.level_intervals(depth).map_err(|e| match e {
        FractalError::TooManyIntervals => OracleError::TooManyPoints(2 * crate::fractal::MAX_INTERVALS as u128),
        other => other.into(),
    })?;
    if 2 * intervals.len() > MAX_POINTS {
        return Err(OracleError::TooManyPoints(2 * intervals.len() as u128));
    }
    let mut pts: Vec<f64> = intervals.iter().flat_map(|i| [i.lo(), i.hi()]).collect();
    pts.sort_unstable_by(f64::total_cmp);
    pts.dedup();
    Ok(pts)
}

/// Sorted values `f(x, y)` over all sample pairs.
pub fn image_values(f: &Expr, xs: &[f64], ys: &[f64]) -> Result<Vec<f64>, OracleError> {
    let pairs = xs.len() as u128 * ys.len() as u128;
    if pairs > MAX_POINTS as u128 {
        return Err(OracleError::TooManyPoints(pairs));
    }
    let mut vals = Vec::with_capacity(pairs as usize);
    for &x in xs {
        for &y in ys {
            vals.push(f.eval_real(x, y)?);
        }
    }
    vals.sort_unstable_by(f64::total_cmp);
    Ok(vals)
}

/// Values merged into intervals wherever consecutive values are within `merge_tol`.
pub fn values_to_set(vals: &[f64], merge_tol: f64) -> Result<IntervalSet, OracleError> {
    let mut raw: Vec<Interval> = vals.iter().map(|&v| Interval::point(v)).collect();
    Ok(IntervalSet::normalize_vec(&mut raw, merge_tol)?)
}

pub fn brute_force_image(
    f: &Expr,
    first: Source,
    second: Source,
    depth: usize,
    merge_tol: f64,
) -> Result<IntervalSet, OracleError> {
    let xs = sample_points(first, depth)?;
    let ys = sample_points(second, depth)?;
    values_to_set(&image_values(f, &xs, &ys)?, merge_tol)
}

/// Largest distance from a point of `[lo, hi]` to the sorted `vals`, measured
/// as the widest gap between consecutive values, including the two ends.
pub fn max_gap_within(vals: &[f64], lo: f64, hi: f64) -> f64 {
    let start = vals.partition_point(|&v| v < lo);
    let end = vals.partition_point(|&v| v <= hi);
    let inside = &vals[start..end];
    if inside.is_empty() {
        return hi - lo;
    }
    let mut gap = (inside[0] - lo).max(hi - inside[inside.len() - 1]);
    for w in inside.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    gap
}

/// Whether any value lies in the open interval `(lo, hi)`.
pub fn any_in_open(vals: &[f64], lo: f64, hi: f64) -> bool {
    let i = vals.partition_point(|&v| v <= lo);
    i < vals.len() && vals[i] < hi
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    /// Oracle components not covered by the exact set (must be empty).
    pub uncovered: Vec<Interval>,
    pub hausdorff: f64,
    pub passed: bool,
}

/// The oracle holds genuine image points, so anything outside `exact` is a
/// hard failure of the exact computation.
pub fn compare_to_level_image(oracle: &IntervalSet, exact: &IntervalSet, tol: f64) -> Comparison {
    let uncovered = oracle.uncovered_by(exact, tol);
    Comparison {
        passed: uncovered.is_empty(),
        hausdorff: oracle.hausdorff_distance(exact),
        uncovered,
    }
}
