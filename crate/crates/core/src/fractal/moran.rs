use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FractalError, MAX_INTERVALS};
use crate::interval::Interval;
use crate::param::Param;

/// Retry cap for rejection sampling of one family of children.
const RANDOM_RETRY_CAP: usize = 10_000;

/// Ratio `c` and branching `n` of one construction level.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Level {
    pub c: Param,
    pub n: u32,
}

impl Level {
    pub fn new(c: Param, n: u32) -> Self {
        Level { c, n }
    }
}

#[derive(Debug, Clone, Deserialize)]
struct RawClass {
    #[serde(default)]
    preperiod: Vec<Level>,
    period: Vec<Level>,
    kappa: Param,
}

/// A class of homogeneous Moran sets with overlap bound `kappa`, described by
/// an eventually periodic sequence of levels `(c_k, n_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawClass")]
pub struct MoranClass {
    preperiod: Vec<Level>,
    period: Vec<Level>,
    kappa: Param,
}

impl TryFrom<RawClass> for MoranClass {
    type Error = FractalError;

    fn try_from(r: RawClass) -> Result<Self, Self::Error> {
        MoranClass::new(r.preperiod, r.period, r.kappa)
    }
}

/// One distinct level of a class together with its `xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTriple {
    pub c: BigRational,
    pub n: u32,
    pub xi: BigRational,
}

/// Distinct levels over a range `k >= from`, with the two binding constants
/// of the ratio condition.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSummary {
    pub triples: Vec<LevelTriple>,
    /// `sup_k (1 - xi_k)`
    pub sup_one_minus_xi: BigRational,
    /// `inf_k c_k / (1 - xi_k)`
    pub inf_c_over_one_minus_xi: BigRational,
}

impl MoranClass {
    pub fn new(preperiod: Vec<Level>, period: Vec<Level>, kappa: Param) -> Result<Self, FractalError> {
        if period.is_empty() {
            return Err(FractalError::Invalid("period must not be empty".into()));
        }
        let k = kappa.ratio();
        if k < &BigRational::zero() || k >= &BigRational::one() {
            return Err(FractalError::Invalid(format!("kappa = {kappa} not in [0, 1)")));
        }
        let half = BigRational::new(1.into(), 2.into());
        for lv in preperiod.iter().chain(&period) {
            let c = lv.c.ratio();
            if c <= &BigRational::zero() || c >= &half {
                return Err(FractalError::Invalid(format!("c = {} not in (0, 1/2)", lv.c)));
            }
            if lv.n < 2 {
                return Err(FractalError::Invalid(format!("n = {} < 2", lv.n)));
            }
            if c * BigRational::from_integer(lv.n.into()) >= BigRational::one() {
                return Err(FractalError::Invalid(format!("c*n >= 1 for c = {}, n = {}", lv.c, lv.n)));
            }
        }
        Ok(MoranClass {
            preperiod,
            period,
            kappa,
        })
    }

    pub fn constant(c: Param, n: u32, kappa: Param) -> Result<Self, FractalError> {
        MoranClass::new(vec![], vec![Level::new(c, n)], kappa)
    }

    /// The middle-third Cantor construction `(1/3, 2, 0)`.
    pub fn cantor() -> Self {
        MoranClass::constant(Param::frac(1, 3), 2, Param::int(0)).expect("valid class")
    }

    pub fn kappa(&self) -> &Param {
        &self.kappa
    }

    pub fn preperiod(&self) -> &[Level] {
        &self.preperiod
    }

    pub fn period(&self) -> &[Level] {
        &self.period
    }

    /// Level `k >= 1`.
    pub fn level(&self, k: usize) -> &Level {
        assert!(k >= 1, "levels are numbered from 1");
        let i = k - 1;
        if i < self.preperiod.len() {
            &self.preperiod[i]
        } else {
            &self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    /// `xi = c (2 + (n - 2)(1 - kappa))` for a level of this class.
    pub fn xi_of(&self, lv: &Level) -> BigRational {
        let n = BigRational::from_integer((lv.n as i64 - 2).into());
        let two = BigRational::from_integer(2.into());
        lv.c.ratio() * (two + n * (BigRational::one() - self.kappa.ratio()))
    }

    pub fn xi(&self, k: usize) -> BigRational {
        self.xi_of(self.level(k))
    }

    /// Relative span `(1 + (n - 2)(1 - kappa)) c` of the first `n - 1`
    /// children when packed with maximal overlap.
    pub fn left_block_of(&self, lv: &Level) -> BigRational {
        let n = BigRational::from_integer((lv.n as i64 - 2).into());
        lv.c.ratio() * (BigRational::one() + n * (BigRational::one() - self.kappa.ratio()))
    }

    pub fn distinct_levels(&self) -> LevelSummary {
        self.distinct_levels_from(1)
    }

    /// Distinct `(c, n, xi)` over all `k >= from`. Eventual periodicity makes
    /// this a finite set: the tail of the preperiod plus the whole period.
    pub fn distinct_levels_from(&self, from: usize) -> LevelSummary {
        let start = from.max(1) - 1;
        let mut seen: Vec<&Level> = Vec::new();
        for lv in self.preperiod.iter().skip(start).chain(&self.period) {
            if !seen.contains(&lv) {
                seen.push(lv);
            }
        }
        let triples: Vec<LevelTriple> = seen
            .into_iter()
            .map(|lv| LevelTriple {
                c: lv.c.ratio().clone(),
                n: lv.n,
                xi: self.xi_of(lv),
            })
            .collect();
        let one = BigRational::one();
        let sup = triples
            .iter()
            .map(|t| &one - &t.xi)
            .max()
            .expect("period is nonempty");
        let inf = triples
            .iter()
            .map(|t| &t.c / (&one - &t.xi))
            .min()
            .expect("period is nonempty");
        LevelSummary {
            triples,
            sup_one_minus_xi: sup,
            inf_c_over_one_minus_xi: inf,
        }
    }
}

/// How children are placed inside each parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "strategy", content = "seed")]
pub enum Strategy {
    /// Equally spaced children, no overlaps.
    Uniform,
    /// First `n - 1` children overlapping consecutively by exactly `kappa`,
    /// last child at the right end.
    ExtremeLeftPacked,
    /// Rejection-sampled admissible placement, reproducible from the seed.
    Random(u64),
}

/// One concrete Moran construction down to a finite depth.
#[derive(Debug, Clone, PartialEq)]
pub struct MoranRealization {
    class: MoranClass,
    depth: usize,
    /// `offsets[k-1][parent]` lists the child left offsets in units of the
    /// parent's length.
    offsets: Vec<Vec<Vec<f64>>>,
}

fn sample_offsets(rng: &mut ChaCha8Rng, n: usize, c: f64, min_step: f64) -> Option<Vec<f64>> {
    let last = 1.0 - c;
    for _ in 0..RANDOM_RETRY_CAP {
        let mut v = Vec::with_capacity(n);
        v.push(0.0);
        for _ in 0..n - 2 {
            v.push(rng.gen_range(0.0..=last));
        }
        v.push(last);
        v[1..n - 1].sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[1] - w[0] >= min_step) {
            return Some(v);
        }
    }
    None
}

impl MoranRealization {
    pub fn realize(class: &MoranClass, depth: usize, strategy: Strategy) -> Result<Self, FractalError> {
        if depth < 1 {
            return Err(FractalError::Invalid("realization depth must be at least 1".into()));
        }
        let kappa = class.kappa().to_f64();
        let mut rng = match strategy {
            Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        let mut parents: usize = 1;
        let mut offsets = Vec::with_capacity(depth);
        for k in 1..=depth {
            let lv = class.level(k);
            let n = lv.n as usize;
            let c = lv.c.to_f64();
            let mut level = Vec::with_capacity(parents);
            for _ in 0..parents {
                let kids = match strategy {
                    Strategy::Uniform => (0..n)
                        .map(|j| if j == n - 1 { 1.0 - c } else { j as f64 * (1.0 - c) / (n - 1) as f64 })
                        .collect(),
                    Strategy::ExtremeLeftPacked => (0..n)
                        .map(|j| if j == n - 1 { 1.0 - c } else { j as f64 * c * (1.0 - kappa) })
                        .collect(),
                    Strategy::Random(_) => {
                        let rng = rng.as_mut().expect("seeded");
                        sample_offsets(rng, n, c, c * (1.0 - kappa)).ok_or_else(|| {
                            FractalError::Invalid(format!(
                                "random placement at level {k} exceeded {RANDOM_RETRY_CAP} retries"
                            ))
                        })?
                    }
                };
                level.push(kids);
            }
            offsets.push(level);
            parents = parents
                .checked_mul(n)
                .filter(|&p| p <= MAX_INTERVALS)
                .ok_or(FractalError::TooManyIntervals)?;
        }
        Ok(MoranRealization {
            class: class.clone(),
            depth,
            offsets,
        })
    }

    pub fn class(&self) -> &MoranClass {
        &self.class
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Child offsets at level `k` for every parent.
    pub fn offsets(&self, k: usize) -> &[Vec<f64>] {
        &self.offsets[k - 1]
    }

    /// The `n_1 ... n_k` basic intervals of level `k`, parent-major, unmerged.
    /// Level 0 is `[0, 1]`.
    pub fn level_intervals(&self, k: usize) -> Result<Vec<Interval>, FractalError> {
        if k > self.depth {
            return Err(FractalError::DepthExceeded {
                requested: k,
                available: self.depth,
            });
        }
        let mut cur: Vec<(f64, f64)> = vec![(0.0, 1.0)];
        for j in 1..=k {
            let c = self.class.level(j).c.to_f64();
            let level = &self.offsets[j - 1];
            let mut next = Vec::with_capacity(cur.len() * self.class.level(j).n as usize);
            for (p, &(start, len)) in cur.iter().enumerate() {
                for &off in &level[p] {
                    next.push((start + off * len, len * c));
                }
            }
            cur = next;
        }
        Ok(cur
            .into_iter()
            .map(|(s, l)| Interval::new(s, s + l).expect("finite basic interval"))
            .collect())
    }

    /// Checks pinning, ordering and the overlap bound at every level.
    pub fn check_invariants(&self, slack: f64) -> Result<(), String> {
        let kappa = self.class.kappa().to_f64();
        for k in 1..=self.depth {
            let c = self.class.level(k).c.to_f64();
            let n = self.class.level(k).n as usize;
            for (p, kids) in self.offsets[k - 1].iter().enumerate() {
                if kids.len() != n {
                    return Err(format!("level {k} parent {p}: {} children, expected {n}", kids.len()));
                }
                if kids[0] != 0.0 || (kids[n - 1] - (1.0 - c)).abs() > slack {
                    return Err(format!("level {k} parent {p}: endpoints not pinned"));
                }
                for w in kids.windows(2) {
                    if w[1] + slack < w[0] + c * (1.0 - kappa) {
                        return Err(format!("level {k} parent {p}: overlap exceeds kappa"));
                    }
                }
            }
        }
        Ok(())
    }
}
