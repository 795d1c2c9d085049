//! Extreme configurations of neighbouring basic intervals.
//!
//! For each sign case the closed-interval argument reduces to one inequality
//! `f(P_hi) >= f(P_lo)` between two explicit points whose difference is a
//! displacement `(l1, l2)`. The generators below build these point pairs in
//! exact arithmetic so that both the displacement identity and the inequality
//! can be tested directly.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::certifier::{Quadrant, SignCase};
use crate::expr::{EvalError, Expr};
use crate::fractal::{FractalError, HomogeneousIFS, MoranClass};
use crate::param::ratio_to_f64;

pub const DEFAULT_X0_SAMPLES: usize = 9;
/// Cap on `(u, v)` parent word pairs enumerated by [`sss_extreme_pairs`].
pub const MAX_WORD_PAIRS: usize = 200;

type Point = (BigRational, BigRational);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixturePair {
    /// Index of `P_hi`; `P_lo` is `index + 1` and the displacement is
    /// `(l_index, l_{index+1})`.
    pub index: usize,
    #[serde(serialize_with = "ser_point")]
    pub p_hi: Point,
    #[serde(serialize_with = "ser_point")]
    pub p_lo: Point,
    #[serde(serialize_with = "ser_point")]
    pub l: Point,
    pub case: SignCase,
    pub k: usize,
}

fn ser_point<S: serde::Serializer>(p: &Point, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&ratio_to_f64(&p.0))?;
    t.serialize_element(&ratio_to_f64(&p.1))?;
    t.end()
}

impl FixturePair {
    /// `P_hi - P_lo == (l1, l2)` exactly.
    pub fn displacement_holds(&self) -> bool {
        &self.p_hi.0 - &self.p_lo.0 == self.l.0 && &self.p_hi.1 - &self.p_lo.1 == self.l.1
    }

    /// `f(P_hi) - f(P_lo)` in floating point.
    pub fn gain(&self, f: &Expr) -> Result<f64, EvalError> {
        let at = |p: &Point| f.eval_real(ratio_to_f64(&p.0), ratio_to_f64(&p.1));
        Ok(at(&self.p_hi)? - at(&self.p_lo)?)
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn pair(index: usize, p_hi: Point, p_lo: Point, l: Point, case: SignCase, k: usize) -> FixturePair {
    FixturePair {
        index,
        p_hi,
        p_lo,
        l,
        case,
        k,
    }
}

/// `samples` equally spaced points of `[lo, hi]` (just `lo` for one sample).
fn spread(lo: &BigRational, hi: &BigRational, samples: usize) -> Vec<BigRational> {
    if samples <= 1 {
        return vec![lo.clone()];
    }
    let steps = rat(samples as i64 - 1);
    (0..samples)
        .map(|i| lo + (hi - lo) * rat(i as i64) / &steps)
        .collect()
}

/// Extreme pairs for two sets of one Moran class inside the outermost
/// parents `I = J = [0, C_{k-1}]` at level `k`; `x0` ranges over the
/// positions that keep both points inside `I`.
pub fn extreme_pairs(class: &MoranClass, k: usize, case: SignCase, x0_samples: usize) -> Vec<FixturePair> {
    assert!(k >= 1, "levels are numbered from 1");
    let parent: BigRational = (1..k).map(|i| class.level(i).c.ratio().clone()).product();
    let lv = class.level(k);
    let child = &parent * lv.c.ratio();
    let block = &parent * class.left_block_of(lv);
    let xi_m1 = class.xi(k) - rat(1);
    let zero = BigRational::zero();
    let short = &parent - &child;

    let mut out = Vec::new();
    let (x0_lo, x0_hi) = match case.case {
        Quadrant::PP => (child.clone(), parent.clone()),
        _ => (zero.clone(), short.clone()),
    };
    for x0 in spread(&x0_lo, &x0_hi, x0_samples) {
        out.push(match case.case {
            Quadrant::PP => pair(
                1,
                (x0.clone(), block.clone()),
                (&x0 - &child, short.clone()),
                (child.clone(), &parent * (class.left_block_of(lv) - (rat(1) - lv.c.ratio()))),
                case,
                k,
            ),
            Quadrant::NN => pair(
                5,
                (x0.clone(), short.clone()),
                (&x0 + &child, block.clone()),
                (-&child, -(&parent * &xi_m1)),
                case,
                k,
            ),
            Quadrant::NP => pair(
                9,
                (x0.clone(), block.clone()),
                (&x0 + &child, short.clone()),
                (-&child, &parent * &xi_m1),
                case,
                k,
            ),
            Quadrant::PN => pair(
                13,
                (&x0 + &child, short.clone()),
                (x0.clone(), block.clone()),
                (child.clone(), &parent * -&xi_m1),
                case,
                k,
            ),
        });
    }
    out.push(match case.case {
        Quadrant::PP => pair(
            3,
            (block.clone(), parent.clone()),
            (short.clone(), zero.clone()),
            (&parent * &xi_m1, parent.clone()),
            case,
            k,
        ),
        Quadrant::NN => pair(
            7,
            (short.clone(), zero.clone()),
            (block.clone(), parent.clone()),
            (&parent * -&xi_m1, -&parent),
            case,
            k,
        ),
        Quadrant::NP => pair(
            11,
            (short.clone(), parent.clone()),
            (block.clone(), zero.clone()),
            (-(&parent * &xi_m1), parent.clone()),
            case,
            k,
        ),
        Quadrant::PN => pair(
            15,
            (block.clone(), zero.clone()),
            (short.clone(), parent.clone()),
            (&parent * &xi_m1, -&parent),
            case,
            k,
        ),
    });
    out
}

/// Word of length `len` over `base` letters (1-based) with the given rank.
fn word_of(mut rank: u128, base: usize, len: usize) -> Vec<usize> {
    let mut w = vec![1; len];
    for slot in w.iter_mut().rev() {
        *slot = (rank % base as u128) as usize + 1;
        rank /= base as u128;
    }
    w
}

/// Parent word pairs `(u, v)` of length `k - 1`, evenly subsampled down to
/// [`MAX_WORD_PAIRS`].
fn parent_words(n: usize, m: usize, len: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let count_n = (n as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    let count_m = (m as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    let total = count_n.saturating_mul(count_m);
    let picks: Vec<u128> = if total <= MAX_WORD_PAIRS as u128 {
        (0..total).collect()
    } else {
        (0..MAX_WORD_PAIRS as u128)
            .map(|t| t * (total / MAX_WORD_PAIRS as u128))
            .collect()
    };
    picks
        .into_iter()
        .map(|r| (word_of(r / count_m, n, len), word_of(r % count_m, m, len)))
        .collect()
}

/// Extreme pairs for two homogeneous self-similar sets with a common ratio,
/// for every sampled parent pair, every child `i` of the first set and every
/// adjacent pair `j` of the second (and vice versa).
pub fn sss_extreme_pairs(
    k1: &HomogeneousIFS,
    k2: &HomogeneousIFS,
    k: usize,
    case: SignCase,
) -> Result<Vec<FixturePair>, FractalError> {
    assert!(k >= 1, "levels are numbered from 1");
    if k1.lambda() != k2.lambda() {
        return Err(FractalError::Invalid("both IFS must share one ratio".into()));
    }
    let lam = k1.lambda().ratio();
    let lam_k1: BigRational = (1..k).map(|_| lam.clone()).product();
    let lam_k = &lam_k1 * lam;
    let (zero, one) = (BigRational::zero(), BigRational::one());
    let (n, m) = (k1.len(), k2.len());
    let f = |w: &[usize], z: &BigRational| k1.apply_word(w, z);
    let g = |w: &[usize], z: &BigRational| k2.apply_word(w, z);
    let cat = |w: &[usize], i: usize| {
        let mut v = w.to_vec();
        v.push(i);
        v
    };

    let mut out = Vec::new();
    for (u, v) in parent_words(n, m, k - 1) {
        let fu0 = f(&u, &zero);
        let gv0 = g(&v, &zero);
        // pairs inside one column: child i of the first set, adjacent j, j+1 of the second
        for i in 1..=n {
            let ui = cat(&u, i);
            for j in 1..m {
                let gj1 = g(&cat(&v, j), &one);
                let gj0 = g(&cat(&v, j + 1), &zero);
                let gap = k2.apply(j, &one) - k2.apply(j + 1, &zero);
                out.push(match case.case {
                    Quadrant::PP => pair(
                        17,
                        (f(&ui, &one), &gv0 + &lam_k1 * k2.apply(j, &one)),
                        (f(&ui, &one) - &lam_k, &gv0 + &lam_k1 * k2.apply(j + 1, &zero)),
                        (lam_k.clone(), &lam_k1 * &gap),
                        case,
                        k,
                    ),
                    Quadrant::NN => pair(
                        21,
                        (f(&ui, &zero), gj0.clone()),
                        (f(&ui, &zero) + &lam_k, gj1.clone()),
                        (-&lam_k, &lam_k1 * -&gap),
                        case,
                        k,
                    ),
                    Quadrant::NP => pair(
                        25,
                        (f(&ui, &zero), gj1.clone()),
                        (f(&ui, &zero) + &lam_k, gj0.clone()),
                        (-&lam_k, &lam_k1 * &gap),
                        case,
                        k,
                    ),
                    Quadrant::PN => pair(
                        29,
                        (f(&ui, &one), gj0.clone()),
                        (f(&ui, &one) - &lam_k, gj1.clone()),
                        (lam_k.clone(), &lam_k1 * -&gap),
                        case,
                        k,
                    ),
                });
            }
        }
        // pairs across columns: adjacent i, i+1 of the first set against the whole parent of the second
        for i in 1..n {
            let gap = k1.apply(i, &one) - k1.apply(i + 1, &zero);
            let top = &gv0 + &lam_k1;
            out.push(match case.case {
                Quadrant::PP => pair(
                    19,
                    (&fu0 + &lam_k1 * k1.apply(i, &one), top),
                    (&fu0 + &lam_k1 * k1.apply(i + 1, &zero), gv0.clone()),
                    (&lam_k1 * &gap, lam_k1.clone()),
                    case,
                    k,
                ),
                Quadrant::NN => pair(
                    23,
                    (f(&cat(&u, i + 1), &zero), gv0.clone()),
                    (f(&cat(&u, i), &one), top),
                    (&lam_k1 * -&gap, -&lam_k1),
                    case,
                    k,
                ),
                Quadrant::NP => pair(
                    27,
                    (f(&cat(&u, i + 1), &zero), top),
                    (f(&cat(&u, i), &one), gv0.clone()),
                    (&lam_k1 * -&gap, lam_k1.clone()),
                    case,
                    k,
                ),
                Quadrant::PN => pair(
                    31,
                    (f(&cat(&u, i), &one), gv0.clone()),
                    (f(&cat(&u, i + 1), &zero), top),
                    (&lam_k1 * &gap, -&lam_k1),
                    case,
                    k,
                ),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cantor_first_level_extremes() {
        let pp = SignCase::new(Quadrant::PP);
        let v = extreme_pairs(&MoranClass::cantor(), 1, pp, 3);
        assert_eq!(v.len(), 4);
        let p1 = &v[0];
        assert_eq!(p1.index, 1);
        assert_eq!(p1.p_hi, (frac(1, 3), frac(1, 3)));
        assert_eq!(p1.p_lo, (frac(0, 1), frac(2, 3)));
        assert_eq!(p1.l, (frac(1, 3), frac(-1, 3)));
        let p3 = v.last().unwrap();
        assert_eq!(p3.p_hi, (frac(1, 3), frac(1, 1)));
        assert_eq!(p3.p_lo, (frac(2, 3), frac(0, 1)));
        assert_eq!(p3.l, (frac(-1, 3), frac(1, 1)));
        assert!(v.iter().all(FixturePair::displacement_holds));
    }

    #[test]
    fn cantor_self_similar_extremes() {
        let c = HomogeneousIFS::cantor();
        let v = sss_extreme_pairs(&c, &c, 1, SignCase::new(Quadrant::PP)).unwrap();
        // two columns times one adjacent pair, plus one cross-column pair
        assert_eq!(v.len(), 3);
        assert_eq!(v[0].l, (frac(1, 3), frac(-1, 3)));
        let f = Expr::parse("x+0.5*y").unwrap();
        assert!((v[0].gain(&f).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!(v.iter().all(FixturePair::displacement_holds));
    }

    #[test]
    fn word_sampling_is_capped() {
        let c = HomogeneousIFS::cantor();
        let v = sss_extreme_pairs(&c, &c, 6, SignCase::new(Quadrant::NN)).unwrap();
        assert_eq!(v.len(), MAX_WORD_PAIRS * 3);
        assert!(v.iter().all(FixturePair::displacement_holds));
        assert_eq!(parent_words(2, 2, 0), vec![(vec![], vec![])]);
    }
}
