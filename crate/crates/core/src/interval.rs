//! Closed intervals with outward-rounded arithmetic.
//!
//! The four field operations use error-free transformations (`two_sum`,
//! `fma`) to detect whether a rounded result is exact. Exact results are kept
//! as-is, inexact ones are pushed one step outward on the side where the true
//! value lies. This is equivalent to directed rounding without touching the
//! FPU rounding mode, and it keeps exact cancellations (`1*1 - 1 = 0`) tight.
//!
//! Transcendental functions go through the platform libm, which is not
//! correctly rounded; their results are widened by [`LIBM_ULPS`] ulps.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Outward widening applied to libm results, in ulps.
pub const LIBM_ULPS: u32 = 2;

/// Below this magnitude `fma`-based error terms may be inexact (subnormal range).
const TINY: f64 = 1e-290;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("invalid interval [{lo}, {hi}]")]
    Invalid { lo: f64, hi: f64 },
    #[error("divisor interval {0} contains zero")]
    DivisorContainsZero(Interval),
    #[error("logarithm argument {0} is not strictly positive")]
    LogDomain(Interval),
    #[error("power base {base} outside the domain of exponent {exponent}")]
    PowDomain { base: Interval, exponent: f64 },
    #[error("interval overflow")]
    Overflow,
}

/// A closed interval `[lo, hi]` with finite endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = IntervalError;

    fn try_from(v: [f64; 2]) -> Result<Self, Self::Error> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if !s.is_finite() {
        return s;
    }
    if e < 0.0 {
        s.next_down()
    } else {
        s
    }
}

pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if !s.is_finite() {
        return s;
    }
    if e > 0.0 {
        s.next_up()
    } else {
        s
    }
}

/// Sign of `a*b - round(a*b)`: -1, 0 or 1. `None` when the error term is unreliable.
fn mul_err_sign(a: f64, b: f64, p: f64) -> Option<f64> {
    if a == 0.0 || b == 0.0 {
        return Some(0.0);
    }
    if !p.is_finite() || p.abs() < TINY {
        return None;
    }
    let e = a.mul_add(b, -p);
    Some(e.signum() * (e != 0.0) as u8 as f64)
}

pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    match mul_err_sign(a, b, p) {
        Some(s) if s >= 0.0 => p,
        _ if !p.is_finite() => p,
        _ => p.next_down(),
    }
}

pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    match mul_err_sign(a, b, p) {
        Some(s) if s <= 0.0 => p,
        _ if !p.is_finite() => p,
        _ => p.next_up(),
    }
}

/// Sign of `a/b - round(a/b)`.
fn div_err_sign(a: f64, b: f64, q: f64) -> Option<f64> {
    if a == 0.0 {
        return Some(0.0);
    }
    if !q.is_finite() || q.abs() < TINY || a.abs() < TINY {
        return None;
    }
    // a - q*b, exact when no underflow occurs
    let r = -q.mul_add(b, -a);
    if r == 0.0 {
        Some(0.0)
    } else {
        Some(r.signum() * b.signum())
    }
}

pub(crate) fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    match div_err_sign(a, b, q) {
        Some(s) if s >= 0.0 => q,
        _ if !q.is_finite() => q,
        _ => q.next_down(),
    }
}

pub(crate) fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    match div_err_sign(a, b, q) {
        Some(s) if s <= 0.0 => q,
        _ if !q.is_finite() => q,
        _ => q.next_up(),
    }
}

fn widen_down(v: f64, ulps: u32) -> f64 {
    (0..ulps).fold(v, |acc, _| acc.next_down())
}

fn widen_up(v: f64, ulps: u32) -> f64 {
    (0..ulps).fold(v, |acc, _| acc.next_up())
}

/// `base^n` for `base >= 0`, rounded down.
fn powi_down(base: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, _| mul_down(acc, base))
}

fn powi_up(base: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, _| mul_up(acc, base))
}

#[allow(clippy::should_implement_trait)]
impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_finite() && hi.is_finite() && lo <= hi {
            Ok(Interval { lo, hi })
        } else {
            Err(IntervalError::Invalid { lo, hi })
        }
    }

    pub fn point(v: f64) -> Self {
        debug_assert!(v.is_finite());
        Interval { lo: v, hi: v }
    }

    pub fn unit() -> Self {
        Interval { lo: 0.0, hi: 1.0 }
    }

    fn checked(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_finite() && hi.is_finite() {
            Ok(Interval { lo, hi })
        } else {
            Err(IntervalError::Overflow)
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        self.lo + 0.5 * (self.hi - self.lo)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Splits at the midpoint.
    pub fn bisect(&self) -> (Interval, Interval) {
        let m = self.mid();
        (
            Interval { lo: self.lo, hi: m },
            Interval { lo: m, hi: self.hi },
        )
    }

    pub fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn add(self, o: Interval) -> Result<Interval, IntervalError> {
        Self::checked(add_down(self.lo, o.lo), add_up(self.hi, o.hi))
    }

    pub fn sub(self, o: Interval) -> Result<Interval, IntervalError> {
        self.add(o.neg())
    }

    pub fn mul(self, o: Interval) -> Result<Interval, IntervalError> {
        let pairs = [
            (self.lo, o.lo),
            (self.lo, o.hi),
            (self.hi, o.lo),
            (self.hi, o.hi),
        ];
        let lo = pairs
            .iter()
            .map(|&(a, b)| mul_down(a, b))
            .fold(f64::INFINITY, f64::min);
        let hi = pairs
            .iter()
            .map(|&(a, b)| mul_up(a, b))
            .fold(f64::NEG_INFINITY, f64::max);
        Self::checked(lo, hi)
    }

    pub fn div(self, o: Interval) -> Result<Interval, IntervalError> {
        if o.contains_zero() {
            return Err(IntervalError::DivisorContainsZero(o));
        }
        let pairs = [
            (self.lo, o.lo),
            (self.lo, o.hi),
            (self.hi, o.lo),
            (self.hi, o.hi),
        ];
        let lo = pairs
            .iter()
            .map(|&(a, b)| div_down(a, b))
            .fold(f64::INFINITY, f64::min);
        let hi = pairs
            .iter()
            .map(|&(a, b)| div_up(a, b))
            .fold(f64::NEG_INFINITY, f64::max);
        Self::checked(lo, hi)
    }

    /// Smallest and largest absolute value over the interval.
    fn abs_range(&self) -> (f64, f64) {
        if self.lo >= 0.0 {
            (self.lo, self.hi)
        } else if self.hi <= 0.0 {
            (-self.hi, -self.lo)
        } else {
            (0.0, (-self.lo).max(self.hi))
        }
    }

    pub fn powi(self, n: i32) -> Result<Interval, IntervalError> {
        if n == 0 {
            return Ok(Interval::point(1.0));
        }
        let m = n.unsigned_abs();
        let positive = if m.is_multiple_of(2) {
            let (mig, mag) = self.abs_range();
            Self::checked(powi_down(mig, m), powi_up(mag, m))?
        } else {
            let lo = if self.lo >= 0.0 {
                powi_down(self.lo, m)
            } else {
                -powi_up(-self.lo, m)
            };
            let hi = if self.hi >= 0.0 {
                powi_up(self.hi, m)
            } else {
                -powi_down(-self.hi, m)
            };
            Self::checked(lo, hi)?
        };
        if n > 0 {
            Ok(positive)
        } else {
            Interval::point(1.0).div(positive).map_err(|_| IntervalError::PowDomain {
                base: self,
                exponent: n as f64,
            })
        }
    }

    /// `x^e` for a non-integer constant exponent; the base must be nonnegative
    /// (strictly positive when `e < 0`).
    pub fn powf(self, e: f64) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 || (e < 0.0 && self.lo <= 0.0) {
            return Err(IntervalError::PowDomain {
                base: self,
                exponent: e,
            });
        }
        let a = self.lo.powf(e);
        let b = self.hi.powf(e);
        let (lo, hi) = if e > 0.0 { (a, b) } else { (b, a) };
        let lo = if lo == 0.0 { 0.0 } else { widen_down(lo, LIBM_ULPS).max(0.0) };
        Self::checked(lo, widen_up(hi, LIBM_ULPS))
    }

    pub fn exp(self) -> Result<Interval, IntervalError> {
        let lo = if self.lo == 0.0 {
            1.0
        } else {
            widen_down(self.lo.exp(), LIBM_ULPS).max(0.0)
        };
        let hi = if self.hi == 0.0 {
            1.0
        } else {
            widen_up(self.hi.exp(), LIBM_ULPS)
        };
        Self::checked(lo, hi)
    }

    pub fn ln(self) -> Result<Interval, IntervalError> {
        if self.lo <= 0.0 {
            return Err(IntervalError::LogDomain(self));
        }
        let lo = if self.lo == 1.0 {
            0.0
        } else {
            widen_down(self.lo.ln(), LIBM_ULPS)
        };
        let hi = if self.hi == 1.0 {
            0.0
        } else {
            widen_up(self.hi.ln(), LIBM_ULPS)
        };
        Self::checked(lo, hi)
    }

    pub fn sin(self) -> Result<Interval, IntervalError> {
        self.trig(f64::sin, 0.5)
    }

    pub fn cos(self) -> Result<Interval, IntervalError> {
        self.trig(f64::cos, 0.0)
    }

    /// Enclosure of a shifted sine/cosine. `max_phase` is the position of the
    /// maxima in units of pi (`t = max_phase*pi + 2k*pi`); minima sit one pi later.
    fn trig(self, f: fn(f64) -> f64, max_phase: f64) -> Result<Interval, IntervalError> {
        use std::f64::consts::PI;
        if self.lo == self.hi && self.lo == 0.0 {
            return Ok(Interval::point(f(0.0)));
        }
        if self.width() >= 2.0 * PI {
            return Ok(Interval { lo: -1.0, hi: 1.0 });
        }
        // A critical point is treated as inside if it is within a small margin of
        // the interval; including an extra one only loosens the bound.
        let margin = 1e-9 * (1.0 + self.lo.abs().max(self.hi.abs()));
        let hits = |phase: f64| -> bool {
            let k_lo = ((self.lo - margin) / PI - phase) / 2.0;
            let k_hi = ((self.hi + margin) / PI - phase) / 2.0;
            k_hi.floor() >= k_lo.ceil()
        };
        let has_max = hits(max_phase);
        let has_min = hits(max_phase + 1.0);
        let (a, b) = (f(self.lo), f(self.hi));
        let exact_at = |v: f64, fv: f64| v == 0.0 && fv.fract() == 0.0;
        let lo = if has_min {
            -1.0
        } else {
            let m = a.min(b);
            if (m == a && exact_at(self.lo, a)) || (m == b && exact_at(self.hi, b)) {
                m
            } else {
                widen_down(m, LIBM_ULPS).max(-1.0)
            }
        };
        let hi = if has_max {
            1.0
        } else {
            let m = a.max(b);
            if (m == a && exact_at(self.lo, a)) || (m == b && exact_at(self.hi, b)) {
                m
            } else {
                widen_up(m, LIBM_ULPS).min(1.0)
            }
        };
        Self::checked(lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn exact_operations_stay_tight() {
        let one = Interval::point(1.0);
        let r = one.mul(one).unwrap().sub(one).unwrap();
        assert_eq!(r, Interval::point(0.0));
        assert_eq!(iv(0.5, 2.0).add(iv(0.25, 1.0)).unwrap(), iv(0.75, 3.0));
    }

    #[test]
    fn inexact_results_are_bracketed() {
        let third = Interval::point(1.0).div(Interval::point(3.0)).unwrap();
        assert!(third.lo() < third.hi());
        assert_eq!(third.hi(), third.lo().next_up());
        let tenth = Interval::point(0.1).add(Interval::point(0.2)).unwrap();
        // 0.1 + 0.2 (binary values) is strictly between two doubles
        assert!(tenth.lo() < tenth.hi());
        assert!(tenth.contains(0.1 + 0.2));
    }

    #[test]
    fn division_by_interval_with_zero_fails() {
        assert!(matches!(
            iv(0.0, 1.0).div(iv(-1.0, 1.0)),
            Err(IntervalError::DivisorContainsZero(_))
        ));
    }

    #[test]
    fn even_powers_use_magnitude() {
        assert_eq!(iv(-2.0, 1.0).powi(2).unwrap(), iv(0.0, 4.0));
        assert_eq!(iv(-2.0, 1.0).powi(3).unwrap(), iv(-8.0, 1.0));
        assert!(iv(-1.0, 1.0).powi(-1).is_err());
    }

    #[test]
    fn trig_enclosures_respect_extrema() {
        use std::f64::consts::PI;
        let s = iv(0.0, PI).sin().unwrap();
        assert_eq!(s.hi(), 1.0);
        assert!(s.lo() <= 0.0 && s.lo() > -1e-15);
        let c = iv(-0.5, 0.5).cos().unwrap();
        assert_eq!(c.hi(), 1.0);
        assert!(c.lo() <= 0.5f64.cos());
        assert_eq!(iv(0.0, 0.0).sin().unwrap(), Interval::point(0.0));
        let wide = iv(-10.0, 10.0).sin().unwrap();
        assert_eq!(wide, iv(-1.0, 1.0));
    }

    #[test]
    fn log_needs_positive_argument() {
        assert!(iv(0.0, 1.0).ln().is_err());
        assert_eq!(iv(1.0, 1.0).ln().unwrap(), Interval::point(0.0));
    }
}
