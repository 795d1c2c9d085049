//! Rigorous verification of the derivative conditions that force `f(E1, E2)`
//! to be a closed interval (or finitely many closed intervals).
//!
//! Every inequality is checked by interval branch-and-bound over a finite box
//! cover of the domain. The outcome is three-way: all conditions proven,
//! one condition provably violated somewhere, or undecided within budget.
//! A violation only means the *sufficient* conditions fail; it never proves
//! the image is not an interval.

mod search;
mod procedures;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fractal::FractalError;
use crate::interval::Interval;

pub use procedures::{
    cantor_constants, certify_linear, certify_moran, certify_nonneg_quadform,
    certify_ratio_bounds, certify_sandwich, certify_sss, classify_signs, sign_pattern_fast_path,
    form_coefficients, moran_directions, proportional, sss_directions, CantorConstants, Directions,
};

pub const DEFAULT_BUDGET: usize = 200_000;
pub const MAX_DEPTH: u32 = 40;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertError {
    #[error(transparent)]
    Fractal(#[from] FractalError),
    #[error("both self-similar sets must share one contraction ratio (got {0} and {1})")]
    MismatchedLambda(String, String),
    #[error("sub-IFS witness does not reproduce the homogeneous IFS")]
    WitnessInvalid,
    #[error("the linear coefficient s must be nonzero")]
    ZeroSlope,
    #[error("invalid domain: {0}")]
    Domain(String),
}

/// Subdivision limits for one condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Boxes examined before giving up.
    pub boxes: usize,
    /// Maximum bisection depth of a single box.
    pub depth: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            boxes: DEFAULT_BUDGET,
            depth: MAX_DEPTH,
        }
    }
}

impl Budget {
    pub fn with_boxes(boxes: usize) -> Self {
        Budget {
            boxes,
            ..Budget::default()
        }
    }
}

/// Joint sign pattern of `(∂x f, ∂y f)`; the first letter is the sign of `∂x f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    PP,
    NN,
    NP,
    PN,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignCase {
    pub case: Quadrant,
    /// `+1` when both partials share a sign, `-1` otherwise.
    pub delta: i8,
}

impl SignCase {
    pub fn new(case: Quadrant) -> Self {
        let delta = match case {
            Quadrant::PP | Quadrant::NN => 1,
            Quadrant::NP | Quadrant::PN => -1,
        };
        SignCase { case, delta }
    }

    pub fn from_signs(fx_positive: bool, fy_positive: bool) -> Self {
        SignCase::new(match (fx_positive, fy_positive) {
            (true, true) => Quadrant::PP,
            (false, false) => Quadrant::NN,
            (false, true) => Quadrant::NP,
            (true, false) => Quadrant::PN,
        })
    }

    pub fn fx_sign(&self) -> i8 {
        match self.case {
            Quadrant::PP | Quadrant::PN => 1,
            _ => -1,
        }
    }

    pub fn fy_sign(&self) -> i8 {
        match self.case {
            Quadrant::PP | Quadrant::NP => 1,
            _ => -1,
        }
    }
}

impl fmt::Display for SignCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} (delta = {:+})", self.case, self.delta)
    }
}

/// Boxes on which the conditions must hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    boxes: Vec<(Interval, Interval)>,
    /// Level `p` when the boxes are the products of level-`p` basic intervals.
    restriction: Option<usize>,
}

impl DomainSpec {
    pub fn unit_square() -> Self {
        DomainSpec {
            boxes: vec![(Interval::unit(), Interval::unit())],
            restriction: None,
        }
    }

    pub fn from_boxes(boxes: Vec<(Interval, Interval)>) -> Result<Self, CertError> {
        if boxes.is_empty() {
            return Err(CertError::Domain("no boxes".into()));
        }
        let unit = Interval::unit();
        if let Some(b) = boxes
            .iter()
            .find(|(x, y)| !x.is_subset_of(&unit) || !y.is_subset_of(&unit))
        {
            return Err(CertError::Domain(format!("box {:?} x {:?} leaves [0,1]^2", b.0, b.1)));
        }
        Ok(DomainSpec {
            boxes,
            restriction: None,
        })
    }

    /// `C_p x D_p` from the level-`p` basic intervals of both sets.
    pub fn restricted(p: usize, c_p: &[Interval], d_p: &[Interval]) -> Result<Self, CertError> {
        if p == 0 {
            return Err(CertError::Domain("restriction level must be at least 1".into()));
        }
        let mut boxes = Vec::with_capacity(c_p.len() * d_p.len());
        for x in c_p {
            for y in d_p {
                boxes.push((*x, *y));
            }
        }
        let mut d = DomainSpec::from_boxes(boxes)?;
        d.restriction = Some(p);
        Ok(d)
    }

    pub fn boxes(&self) -> &[(Interval, Interval)] {
        &self.boxes
    }

    pub fn restriction(&self) -> Option<usize> {
        self.restriction
    }

    pub fn is_unit_square(&self) -> bool {
        self.restriction.is_none()
            && self.boxes.len() == 1
            && self.boxes[0] == (Interval::unit(), Interval::unit())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Certified,
    ConditionsViolated,
    Unknown,
}

impl Status {
    /// Conjunction: any violation wins, then any unknown.
    fn and(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (ConditionsViolated, _) | (_, ConditionsViolated) => ConditionsViolated,
            (Unknown, _) | (_, Unknown) => Unknown,
            _ => Certified,
        }
    }
}

/// Where and why a condition failed or stayed undecided.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub condition: String,
    pub x: Interval,
    pub y: Interval,
    pub enclosure: Option<Interval>,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub boxes: usize,
    pub max_depth: u32,
}

impl Stats {
    fn absorb(&mut self, o: Stats) {
        self.boxes += o.boxes;
        self.max_depth = self.max_depth.max(o.max_depth);
    }
}

/// Outcome of one inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub id: String,
    pub description: String,
    pub status: Status,
    pub witness: Option<Witness>,
    pub stats: Stats,
}

/// What a certified run lets us conclude about the image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Conclusion {
    /// The image is the closed interval `image`, which equals `f([0,1]^2)`
    /// because both sets contain 0 and 1 and `f` is monotone in each variable.
    ClosedInterval { image: Interval },
    /// The image is a union of at most `at_most` closed intervals.
    FinitelyManyIntervals { at_most: usize },
    /// `E1 + E2 = [0, 2]` or `E1 - E2 = [-1, 1]`.
    Steinhaus { image: Interval },
    /// `f(K, K) = f([0,1]^2)` by squeezing between a certified sub-attractor
    /// and the unit square.
    Sandwich { image: Interval },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<Witness>,
    pub stats: Stats,
    pub sign_case: Option<SignCase>,
    pub conditions: Vec<ConditionReport>,
    /// Exact constants used by the checks, printed as rationals.
    pub constants: BTreeMap<String, String>,
    pub conclusion: Option<Conclusion>,
}

impl Verdict {
    /// Conjunction of condition reports; the witness is the first failing or
    /// undecided condition's.
    pub fn from_conditions(conditions: Vec<ConditionReport>) -> Self {
        let mut status = Status::Certified;
        let mut stats = Stats::default();
        for c in &conditions {
            status = status.and(c.status);
            stats.absorb(c.stats);
        }
        let witness = conditions
            .iter()
            .find(|c| c.status == Status::ConditionsViolated)
            .or_else(|| conditions.iter().find(|c| c.status == Status::Unknown))
            .and_then(|c| c.witness.clone());
        Verdict {
            status,
            witness,
            stats,
            sign_case: None,
            conditions,
            constants: BTreeMap::new(),
            conclusion: None,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }

    /// Process exit code: 0 certified, 1 violated, 2 unknown.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Certified => 0,
            Status::ConditionsViolated => 1,
            Status::Unknown => 2,
        }
    }
}
