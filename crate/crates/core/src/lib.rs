//! Certified computations for Cohen-Lenstra measures on finite abelian
//! p-groups.
//!
//! Quantities involving logarithms or infinite products are returned as
//! outward-rounded intervals ([`Interval`], [`CertifiedValue`]) guaranteed to
//! contain the exact value; quantities without logarithms (automorphism
//! counts, Hall sums, the per-class decreasing inequality) are exact.

pub mod entropy;
pub mod error;
pub mod groups;
pub mod measures;
pub mod numerics;
pub mod partitions;
mod series;
pub mod zeta;

pub use error::{Error, Result};
pub use groups::AbelianPGroup;
pub use measures::{CLParams, UnitRank};
pub use numerics::{CertifiedValue, Interval};
pub use partitions::Partition;
pub use series::{level_tail_bound, LevelTerms, MAX_TAIL_LEVEL};
