use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::FractalError;
use crate::interval::Interval;
use crate::param::{ratio_to_f64, Param};

#[derive(Debug, Clone, Deserialize)]
struct RawHomogeneous {
    lambda: Param,
    a: Vec<Param>,
}

/// Attractor of `{ lambda x + a_i }` with convex hull `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHomogeneous")]
pub struct HomogeneousIFS {
    lambda: Param,
    a: Vec<Param>,
}

impl TryFrom<RawHomogeneous> for HomogeneousIFS {
    type Error = FractalError;

    fn try_from(r: RawHomogeneous) -> Result<Self, Self::Error> {
        HomogeneousIFS::new(r.lambda, r.a)
    }
}

/// Gaps between consecutive first-level cylinders.
#[derive(Debug, Clone, PartialEq)]
pub struct GapProfile {
    /// `(i, f_{i+1}(0) - f_i(1))` for every adjacent pair, 1-based.
    pub gaps: Vec<(usize, BigRational)>,
    /// Indices with a strictly positive gap.
    pub positive: Vec<usize>,
    /// Largest positive gap.
    pub tau: BigRational,
}

impl HomogeneousIFS {
    pub fn new(lambda: Param, a: Vec<Param>) -> Result<Self, FractalError> {
        let l = lambda.ratio();
        if l <= &BigRational::zero() || l >= &BigRational::one() {
            return Err(FractalError::Invalid(format!("lambda = {lambda} not in (0, 1)")));
        }
        if a.len() < 2 {
            return Err(FractalError::Invalid("an IFS needs at least two maps".into()));
        }
        if !a.windows(2).all(|w| w[0].ratio() <= w[1].ratio()) {
            return Err(FractalError::Invalid("translations must be nondecreasing".into()));
        }
        if !a[0].ratio().is_zero() {
            return Err(FractalError::Invalid("first translation must be 0".into()));
        }
        if a[a.len() - 1].ratio() + l != BigRational::one() {
            return Err(FractalError::Invalid("last translation must be 1 - lambda".into()));
        }
        Ok(HomogeneousIFS { lambda, a })
    }

    /// `{ x/3, (x+2)/3 }`
    pub fn cantor() -> Self {
        HomogeneousIFS::new(Param::frac(1, 3), vec![Param::int(0), Param::frac(2, 3)]).expect("valid IFS")
    }

    pub fn lambda(&self) -> &Param {
        &self.lambda
    }

    pub fn translations(&self) -> &[Param] {
        &self.a
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `f_i(z)` for a 1-based map index.
    pub fn apply(&self, i: usize, z: &BigRational) -> BigRational {
        self.lambda.ratio() * z + self.a[i - 1].ratio()
    }

    /// `f_w(z) = f_{w_1}(f_{w_2}(... f_{w_m}(z)))` for a word of 1-based indices.
    pub fn apply_word(&self, word: &[usize], z: &BigRational) -> BigRational {
        word.iter().rev().fold(z.clone(), |acc, &i| self.apply(i, &acc))
    }

    pub fn gap_profile(&self) -> Result<GapProfile, FractalError> {
        let gaps: Vec<(usize, BigRational)> = self
            .a
            .windows(2)
            .enumerate()
            .map(|(i, w)| (i + 1, w[1].ratio() - (w[0].ratio() + self.lambda.ratio())))
            .collect();
        let positive: Vec<usize> = gaps
            .iter()
            .filter(|(_, g)| g > &BigRational::zero())
            .map(|(i, _)| *i)
            .collect();
        let tau = gaps
            .iter()
            .filter(|(_, g)| g > &BigRational::zero())
            .map(|(_, g)| g.clone())
            .max()
            .ok_or(FractalError::NoGaps)?;
        Ok(GapProfile { gaps, positive, tau })
    }

    pub fn cylinders(&self, k: usize) -> Result<Vec<Interval>, FractalError> {
        let lambda = self.lambda.to_f64();
        let offs: Vec<f64> = self.a.iter().map(Param::to_f64).collect();
        let maps: Vec<(f64, f64)> = offs.iter().map(|&a| (lambda, a)).collect();
        cylinders_of(&maps, k)
    }
}

/// Parent-major cylinders `f_w([0,1])` for all words of length `k`, given the
/// maps as `(ratio, translation)`.
pub(crate) fn cylinders_of(maps: &[(f64, f64)], k: usize) -> Result<Vec<Interval>, FractalError> {
    let count = maps
        .len()
        .checked_pow(k as u32)
        .filter(|&c| c <= super::MAX_INTERVALS)
        .ok_or(FractalError::TooManyIntervals)?;
    let mut cur: Vec<(f64, f64)> = Vec::with_capacity(count);
    cur.push((0.0, 1.0));
    for _ in 0..k {
        let mut next = Vec::with_capacity(cur.len() * maps.len());
        for &(s, len) in &cur {
            for &(r, a) in maps {
                next.push((s + a * len, len * r));
            }
        }
        cur = next;
    }
    Ok(cur
        .into_iter()
        .map(|(s, l)| Interval::new(s, s + l).expect("finite cylinder"))
        .collect())
}

/// One map `r x + a` of a general IFS.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Map {
    pub r: Param,
    pub a: Param,
}

#[derive(Debug, Clone, Deserialize)]
struct RawGeneral {
    maps: Vec<Map>,
}

/// Self-similar set with positive, possibly different, ratios and convex hull `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGeneral")]
pub struct GeneralIFS {
    maps: Vec<Map>,
}

impl TryFrom<RawGeneral> for GeneralIFS {
    type Error = FractalError;

    fn try_from(r: RawGeneral) -> Result<Self, Self::Error> {
        GeneralIFS::new(r.maps)
    }
}

impl GeneralIFS {
    pub fn new(maps: Vec<Map>) -> Result<Self, FractalError> {
        if maps.len() < 2 {
            return Err(FractalError::Invalid("an IFS needs at least two maps".into()));
        }
        for m in &maps {
            let r = m.r.ratio();
            if r <= &BigRational::zero() || r >= &BigRational::one() {
                return Err(FractalError::Invalid(format!("ratio {} not in (0, 1)", m.r)));
            }
        }
        let min_a = maps.iter().map(|m| m.a.ratio()).min().expect("nonempty");
        let max_b = maps.iter().map(|m| m.r.ratio() + m.a.ratio()).max().expect("nonempty");
        if !min_a.is_zero() || max_b != BigRational::one() {
            return Err(FractalError::Invalid("convex hull of the attractor must be [0, 1]".into()));
        }
        Ok(GeneralIFS { maps })
    }

    pub fn maps(&self) -> &[Map] {
        &self.maps
    }

    pub fn cylinders(&self, k: usize) -> Result<Vec<Interval>, FractalError> {
        let maps: Vec<(f64, f64)> = self.maps.iter().map(|m| (m.r.to_f64(), m.a.to_f64())).collect();
        cylinders_of(&maps, k)
    }

    /// Ratio and translation of `f_{w_1} ∘ ... ∘ f_{w_m}`.
    pub fn compose(&self, word: &[usize]) -> Result<(BigRational, BigRational), FractalError> {
        let mut ratio = BigRational::one();
        let mut shift = BigRational::zero();
        // f_w(z) = ratio * z + shift, built outermost first
        for &i in word {
            let m = self.maps.get(i.wrapping_sub(1)).ok_or(FractalError::WordIndex {
                index: i,
                maps: self.maps.len(),
            })?;
            shift += &ratio * m.a.ratio();
            ratio *= m.r.ratio();
        }
        Ok((ratio, shift))
    }
}

impl From<&HomogeneousIFS> for GeneralIFS {
    fn from(h: &HomogeneousIFS) -> Self {
        GeneralIFS {
            maps: h
                .a
                .iter()
                .map(|a| Map {
                    r: h.lambda.clone(),
                    a: a.clone(),
                })
                .collect(),
        }
    }
}

/// Parses a witness word: digits (`"13"`), or indices separated by commas or spaces.
pub fn parse_word(w: &str) -> Result<Vec<usize>, FractalError> {
    let bad = || FractalError::Invalid(format!("malformed word '{w}'"));
    let w = w.trim();
    if w.is_empty() {
        return Err(bad());
    }
    if w.contains([',', ' ']) {
        w.split([',', ' '])
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().map_err(|_| bad()))
            .collect()
    } else {
        w.chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
            .collect()
    }
}

/// Checks that every map of `sub` is the composition of `k`'s maps along the
/// corresponding word, and that both hulls are `[0, 1]`.
///
/// Comparison is exact unless some parameter was given as a binary float, in
/// which case values are compared to within `1e-12`.
pub fn verify_subifs_witness(
    k: &GeneralIFS,
    sub: &HomogeneousIFS,
    words: &[String],
) -> Result<bool, FractalError> {
    if words.len() != sub.len() {
        return Err(FractalError::Invalid(format!(
            "{} witness words for {} maps",
            words.len(),
            sub.len()
        )));
    }
    let exact = sub.lambda.is_exact()
        && sub.a.iter().all(Param::is_exact)
        && k.maps.iter().all(|m| m.r.is_exact() && m.a.is_exact());
    let same = |a: &BigRational, b: &BigRational| {
        if exact {
            a == b
        } else {
            (ratio_to_f64(a) - ratio_to_f64(b)).abs() <= 1e-12
        }
    };
    for (w, target) in words.iter().zip(&sub.a) {
        let word = parse_word(w)?;
        let (ratio, shift) = k.compose(&word)?;
        if !same(&ratio, sub.lambda.ratio()) || !same(&shift, target.ratio()) {
            return Ok(false);
        }
    }
    // conv(sub) = conv(k) = [0, 1] is guaranteed by both constructors
    Ok(true)
}
