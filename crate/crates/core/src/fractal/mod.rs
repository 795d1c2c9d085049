//! Moran classes, their concrete realizations, and self-similar sets given by
//! iterated function systems.

mod ifs;
mod moran;

use thiserror::Error;

pub use ifs::{parse_word, verify_subifs_witness, GapProfile, GeneralIFS, HomogeneousIFS, Map};
pub use moran::{Level, LevelSummary, LevelTriple, MoranClass, MoranRealization, Strategy};

use crate::interval::Interval;

/// Upper bound on the number of intervals materialized at one level.
pub const MAX_INTERVALS: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FractalError {
    #[error("invalid construction: {0}")]
    Invalid(String),
    #[error("level {requested} requested but the realization has depth {available}")]
    DepthExceeded { requested: usize, available: usize },
    #[error("more than {MAX_INTERVALS} intervals")]
    TooManyIntervals,
    #[error("no positive gap between first-level cylinders; the attractor is an interval")]
    NoGaps,
    #[error("word index {index} out of range for an IFS with {maps} maps")]
    WordIndex { index: usize, maps: usize },
}

/// Anything that yields nested level-k covers of a set with hull `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub enum Source<'a> {
    Moran(&'a MoranRealization),
    Homogeneous(&'a HomogeneousIFS),
    General(&'a GeneralIFS),
}

impl Source<'_> {
    pub fn level_intervals(&self, k: usize) -> Result<Vec<Interval>, FractalError> {
        match self {
            Source::Moran(r) => r.level_intervals(k),
            Source::Homogeneous(h) => h.cylinders(k),
            Source::General(g) => g.cylinders(k),
        }
    }

    /// Deepest available level, if bounded.
    pub fn max_depth(&self) -> Option<usize> {
        match self {
            Source::Moran(r) => Some(r.depth()),
            _ => None,
        }
    }
}
