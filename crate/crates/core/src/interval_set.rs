//! Normalized finite unions of disjoint closed intervals.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::Interval;

/// Merge tolerance for constructions where touching is exact by design.
pub const CONSTRUCTION_MERGE_TOL: f64 = 1e-12;
/// Merge / comparison tolerance for computed images.
pub const IMAGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SetError {
    #[error("cannot normalize an empty list of intervals")]
    Empty,
    #[error("merge tolerance must be finite and nonnegative, got {0}")]
    BadTolerance(f64),
}

/// Sorted, pairwise disjoint closed intervals whose gaps exceed the merge
/// tolerance used to build them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalSet {
    items: Vec<Interval>,
}

/// Shows at most four components, then an ellipsis.
impl std::fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, c) in self.items.iter().take(4).enumerate() {
            if i > 0 {
                write!(f, " u ")?;
            }
            write!(f, "{c}")?;
        }
        if self.items.len() > 4 {
            write!(f, " u ... ({} more)", self.items.len() - 4)?;
        }
        Ok(())
    }
}

impl IntervalSet {
    /// Sorts by left endpoint and merges any two intervals whose gap is at
    /// most `merge_tol`.
    pub fn normalize(raw: &[Interval], merge_tol: f64) -> Result<Self, SetError> {
        let mut v = raw.to_vec();
        Self::normalize_vec(&mut v, merge_tol)
    }

    /// Like [`IntervalSet::normalize`], reusing the caller's buffer.
    #[allow(clippy::ptr_arg)]
    pub fn normalize_vec(raw: &mut Vec<Interval>, merge_tol: f64) -> Result<Self, SetError> {
        if raw.is_empty() {
            return Err(SetError::Empty);
        }
        if !(merge_tol >= 0.0 && merge_tol.is_finite()) {
            return Err(SetError::BadTolerance(merge_tol));
        }
        raw.sort_unstable_by(|a, b| a.lo().total_cmp(&b.lo()));
        let mut items: Vec<Interval> = Vec::new();
        let mut cur = raw[0];
        for next in raw.iter().skip(1) {
            if next.lo() - cur.hi() <= merge_tol {
                cur = cur.hull(next);
            } else {
                items.push(cur);
                cur = *next;
            }
        }
        items.push(cur);
        Ok(IntervalSet { items })
    }

    pub fn single(i: Interval) -> Self {
        IntervalSet { items: vec![i] }
    }

    pub fn items(&self) -> &[Interval] {
        &self.items
    }

    pub fn component_count(&self) -> usize {
        self.items.len()
    }

    pub fn min(&self) -> f64 {
        self.items[0].lo()
    }

    pub fn max(&self) -> f64 {
        self.items[self.items.len() - 1].hi()
    }

    pub fn hull(&self) -> Interval {
        Interval::new(self.min(), self.max()).expect("normalized set has ordered endpoints")
    }

    pub fn contains(&self, v: f64) -> bool {
        self.component_of(v).is_some()
    }

    fn component_of(&self, v: f64) -> Option<usize> {
        let idx = self.items.partition_point(|i| i.hi() < v);
        (idx < self.items.len() && self.items[idx].lo() <= v).then_some(idx)
    }

    /// Distance from `v` to the union.
    pub fn distance_to(&self, v: f64) -> f64 {
        let idx = self.items.partition_point(|i| i.hi() < v);
        let mut d = f64::INFINITY;
        if idx < self.items.len() {
            d = d.min((self.items[idx].lo() - v).max(0.0));
        }
        if idx > 0 {
            d = d.min(v - self.items[idx - 1].hi());
        }
        d
    }

    /// Same component count and every endpoint within `tol`.
    pub fn set_equal(&self, other: &IntervalSet, tol: f64) -> bool {
        self.items.len() == other.items.len()
            && self.items.iter().zip(&other.items).all(|(a, b)| {
                (a.lo() - b.lo()).abs() <= tol && (a.hi() - b.hi()).abs() <= tol
            })
    }

    /// Every component of `self` lies in some component of `other` enlarged by `tol`.
    pub fn subset_of(&self, other: &IntervalSet, tol: f64) -> bool {
        self.items.iter().all(|a| {
            let idx = other.items.partition_point(|b| b.hi() + tol < a.lo());
            idx < other.items.len()
                && other.items[idx].lo() - tol <= a.lo()
                && a.hi() <= other.items[idx].hi() + tol
        })
    }

    /// Components of `self` that are not covered by `other` (with `tol` slack).
    pub fn uncovered_by(&self, other: &IntervalSet, tol: f64) -> Vec<Interval> {
        self.items
            .iter()
            .filter(|a| !IntervalSet::single(**a).subset_of(other, tol))
            .copied()
            .collect()
    }

    /// `sup_{a in self} dist(a, other)`.
    fn directed_hausdorff(&self, other: &IntervalSet) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.items {
            worst = worst
                .max(other.distance_to(a.lo()))
                .max(other.distance_to(a.hi()));
        }
        // interior maxima sit at midpoints of the gaps of `other`
        for w in other.items.windows(2) {
            let m = 0.5 * (w[0].hi() + w[1].lo());
            if self.contains(m) {
                worst = worst.max(m - w[0].hi());
            }
        }
        worst
    }

    pub fn hausdorff_distance(&self, other: &IntervalSet) -> f64 {
        self.directed_hausdorff(other)
            .max(other.directed_hausdorff(self))
    }

    /// Largest gap between consecutive components (0 for a single interval).
    pub fn max_gap(&self) -> f64 {
        self.items
            .windows(2)
            .map(|w| w[1].lo() - w[0].hi())
            .fold(0.0, f64::max)
    }
}
