//! Certified continuous images `f(E1, E2)` of overlapping Moran sets and
//! homogeneous self-similar sets.

pub mod certifier;
pub mod expr;
pub mod fractal;
pub mod image;
pub mod interval;
pub mod interval_set;
pub mod oracle;
pub mod param;

pub use expr::{Expr, PartialBundle, Var};
pub use interval::Interval;
pub use interval_set::IntervalSet;
pub use param::Param;
pub mod job;
pub mod demo;
