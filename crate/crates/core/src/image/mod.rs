//! Finite-level images `f(C_k, D_k)` and their stabilization across levels.
//!
//! When `f` is strictly monotone in each variable the image of a box is the
//! interval between two opposite corners, so `f(C_k, D_k)` is computed
//! exactly (up to floating-point evaluation) as a union over box pairs.

mod fixtures;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certifier::{Quadrant, SignCase};
use crate::expr::{EvalError, Expr};
use crate::fractal::{FractalError, Source};
use crate::interval::Interval;
use crate::interval_set::{IntervalSet, SetError};

pub use fixtures::{extreme_pairs, sss_extreme_pairs, FixturePair, DEFAULT_X0_SAMPLES, MAX_WORD_PAIRS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImageError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Fractal(#[from] FractalError),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// Corners `(argmin, argmax)` of a box for a function monotone per `sc`.
fn extreme_corners(sc: SignCase, x: Interval, y: Interval) -> ((f64, f64), (f64, f64)) {
    let (xl, xh, yl, yh) = (x.lo(), x.hi(), y.lo(), y.hi());
    match sc.case {
        Quadrant::PP => ((xl, yl), (xh, yh)),
        Quadrant::NN => ((xh, yh), (xl, yl)),
        Quadrant::NP => ((xh, yl), (xl, yh)),
        Quadrant::PN => ((xl, yh), (xh, yl)),
    }
}

/// `f(X, Y)` for `f` monotone per `sc`. Without a sign case the four corner
/// values are used, which is exact only for functions monotone in each
/// variable on this particular box (e.g. `x*y` on the nonnegative quadrant).
pub fn box_image(f: &Expr, sc: Option<SignCase>, x: Interval, y: Interval) -> Result<Interval, EvalError> {
    let (lo, hi) = match sc {
        Some(sc) => {
            let (a, b) = extreme_corners(sc, x, y);
            let fa = f.eval_real(a.0, a.1)?;
            let fb = f.eval_real(b.0, b.1)?;
            (fa.min(fb), fa.max(fb))
        }
        None => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for (px, py) in [(x.lo(), y.lo()), (x.lo(), y.hi()), (x.hi(), y.lo()), (x.hi(), y.hi())] {
                let v = f.eval_real(px, py)?;
                lo = lo.min(v);
                hi = hi.max(v);
            }
            (lo, hi)
        }
    };
    Ok(Interval::new(lo, hi).expect("finite corner values"))
}

/// Rigorous enclosure of `f([0,1]^2)` from the corner values.
pub fn hull_image(f: &Expr, sc: Option<SignCase>) -> Result<Interval, EvalError> {
    let at = |p: (f64, f64)| f.eval_interval(Interval::point(p.0), Interval::point(p.1));
    match sc {
        Some(sc) => {
            let (a, b) = extreme_corners(sc, Interval::unit(), Interval::unit());
            let (lo, hi) = (at(a)?, at(b)?);
            Ok(Interval::new(lo.lo(), hi.hi()).expect("monotone corners are ordered"))
        }
        None => {
            let mut h = at((0.0, 0.0))?;
            for p in [(0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
                h = h.hull(&at(p)?);
            }
            Ok(h)
        }
    }
}

/// `⋃_{I in C, J in D} f(I, J)`, merged with `merge_tol`.
pub fn level_image(
    f: &Expr,
    sc: Option<SignCase>,
    c: &[Interval],
    d: &[Interval],
    merge_tol: f64,
) -> Result<IntervalSet, ImageError> {
    let mut raw = Vec::with_capacity(c.len() * d.len());
    for &x in c {
        for &y in d {
            raw.push(box_image(f, sc, x, y)?);
        }
    }
    Ok(IntervalSet::normalize_vec(&mut raw, merge_tol)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelImage {
    pub k: usize,
    pub image: IntervalSet,
    pub components: usize,
    pub hausdorff_to_previous: Option<f64>,
    /// Equal to the previous level's image within tolerance.
    pub stabilized: Option<bool>,
    /// Contained in the previous level's image within tolerance.
    pub nested: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelImageReport {
    pub levels: Vec<LevelImage>,
    pub stabilized: bool,
    pub nested: bool,
    /// `false` when computed with the four-corner fallback.
    pub rigorous: bool,
}

impl LevelImageReport {
    pub fn last(&self) -> &LevelImage {
        self.levels.last().expect("level 0 is always present")
    }
}

/// Images for `k = 0..=k_max` with level-to-level comparisons.
pub fn stabilization_report(
    f: &Expr,
    sc: Option<SignCase>,
    first: Source,
    second: Source,
    k_max: usize,
    tol: f64,
) -> Result<LevelImageReport, ImageError> {
    let mut levels: Vec<LevelImage> = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let image = level_image(f, sc, &first.level_intervals(k)?, &second.level_intervals(k)?, tol)?;
        let prev = levels.last().map(|l| &l.image);
        levels.push(LevelImage {
            k,
            components: image.component_count(),
            hausdorff_to_previous: prev.map(|p| p.hausdorff_distance(&image)),
            stabilized: prev.map(|p| p.set_equal(&image, tol)),
            nested: prev.map(|p| image.subset_of(p, tol)),
            image,
        });
    }
    Ok(LevelImageReport {
        stabilized: levels.iter().all(|l| l.stabilized != Some(false)),
        nested: levels.iter().all(|l| l.nested != Some(false)),
        rigorous: sc.is_some(),
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractal::{HomogeneousIFS, MoranClass, MoranRealization, Strategy};
    use crate::interval_set::IMAGE_TOL;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn e(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    const PP: SignCase = SignCase {
        case: Quadrant::PP,
        delta: 1,
    };
    const PN: SignCase = SignCase {
        case: Quadrant::PN,
        delta: -1,
    };

    #[test]
    fn corner_rule() {
        assert_eq!(box_image(&e("x+y"), Some(PP), iv(0.0, 1.0 / 3.0), iv(2.0 / 3.0, 1.0)).unwrap(), iv(2.0 / 3.0, 4.0 / 3.0));
        assert_eq!(box_image(&e("x-y"), Some(PN), Interval::unit(), Interval::unit()).unwrap(), iv(-1.0, 1.0));
        let ex9 = e("x^2+y^2+6*x+3*y+0.5*x*y");
        assert_eq!(box_image(&ex9, Some(PP), Interval::unit(), Interval::unit()).unwrap(), iv(0.0, 11.5));
        assert_eq!(hull_image(&ex9, Some(PP)).unwrap(), iv(0.0, 11.5));
        assert_eq!(hull_image(&e("x-y"), None).unwrap(), iv(-1.0, 1.0));
    }

    #[test]
    fn level_one_images() {
        let c = HomogeneousIFS::cantor();
        let c1 = c.cylinders(1).unwrap();
        let sum = level_image(&e("x+y"), Some(PP), &c1, &c1, IMAGE_TOL).unwrap();
        assert!(sum.set_equal(&IntervalSet::single(iv(0.0, 2.0)), 1e-12));
        let prod = level_image(&e("x*y"), None, &c1, &c1, IMAGE_TOL).unwrap();
        let want = IntervalSet::normalize(&[iv(0.0, 1.0 / 3.0), iv(4.0 / 9.0, 1.0)], 0.0).unwrap();
        assert!(prod.set_equal(&want, 1e-12), "{prod:?}");
        let c2 = c.cylinders(2).unwrap();
        let half = level_image(&e("x+0.5*y"), Some(PP), &c2, &c2, IMAGE_TOL).unwrap();
        assert!(half.set_equal(&IntervalSet::single(iv(0.0, 1.5)), 1e-12));
    }

    #[test]
    fn stabilization_of_the_sum() {
        let c = HomogeneousIFS::cantor();
        let r = stabilization_report(&e("x+y"), Some(PP), Source::Homogeneous(&c), Source::Homogeneous(&c), 6, IMAGE_TOL).unwrap();
        assert!(r.stabilized && r.nested && r.rigorous);
        assert_eq!(r.levels.len(), 7);
        assert!(r.levels.iter().all(|l| l.components == 1));
    }

    #[test]
    fn product_does_not_stabilize() {
        let class = MoranClass::cantor();
        let m = MoranRealization::realize(&class, 4, Strategy::Uniform).unwrap();
        let r = stabilization_report(&e("x*y"), None, Source::Moran(&m), Source::Moran(&m), 4, IMAGE_TOL).unwrap();
        assert!(!r.rigorous);
        assert!(r.nested);
        assert!(r.levels[1..].iter().all(|l| l.components >= 2));
        assert!(!r.stabilized);
    }
}
