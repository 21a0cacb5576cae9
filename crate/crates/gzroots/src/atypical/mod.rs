//! Degenerate orbits at roots of unity and the modified basis that removes
//! divergent matrix elements.
//!
//! * [`partition`]: type partitions of a pattern row, exchange maps and
//!   degenerate orbits for any rank.
//! * [`sl3`]: case detection, rotation angles and the closed-form modified
//!   actions for sl(3).
//! * [`builder`]: end-to-end sl(3) assembly. Each degenerate pair of row-2
//!   states is rotated by the q-dependent angle and the limit `q -> root` is
//!   taken with truncated Puiseux series, choosing per-pair orientations so
//!   that every element stays finite.

pub mod builder;
pub mod partition;
pub mod sl3;

use thiserror::Error;

use crate::genrep::{Direction, GenRepError};
use crate::gzbasis::GZPattern;

pub use builder::{build_atypical_sl3, build_rotated_sl3, pair_candidates, DEFAULT_SIGN_BUDGET};
pub use partition::{
    aggregated_coefficient, classify_row_type, exchange_map, exchange_map_with_offset, orbit,
    DegenerateOrbit, TypePartition,
};
pub use sl3::{
    detect_case_sl3, modified_ladder_sl3, rotation_sl3, BasisRotation, Case, Flavor, ModifiedState,
    ModifiedTerm,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AtypicalError {
    #[error("row {row:?} entries {i} and {j} are congruent modulo {m}; no exchange applies")]
    NotDegenerate { row: Vec<i64>, i: usize, j: usize, m: u32 },
    #[error("exchange indices ({i}, {j}) are not distinct entries of a level-{l} row")]
    BadIndices { i: usize, j: usize, l: usize },
    #[error("{pattern}: {reason}")]
    PreconditionViolated { pattern: GZPattern, reason: String },
    #[error("rotation angle for case {case} with gap {gap} is formal at this q: its defining bracket vanishes")]
    FormalAngle { case: Case, gap: i64 },
    #[error("no closed-form modified action for {state} at level {l} ({direction})")]
    UnknownCase {
        state: ModifiedState,
        l: usize,
        direction: Direction,
    },
    #[error("closed form for {state} at level {l} has a vanishing denominator")]
    SingularClosedForm { state: ModifiedState, l: usize },
    #[error("unresolved divergence at {pattern}, level {l}: {detail}")]
    UnresolvedDivergence {
        pattern: GZPattern,
        l: usize,
        detail: String,
    },
    #[error("top row {top:?} has p_13 - p_33 <= {m}; it is not atypical at this order")]
    NotAtypical { top: Vec<i64>, m: u32 },
    #[error("automated modified-basis assembly is available for sl(3) only, got rank {0}")]
    RankUnsupported(usize),
    #[error(transparent)]
    GenRep(#[from] GenRepError),
}

/// One rotated pair of basis states, by basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotatedPair {
    /// State whose row-2 gap is below the center.
    pub lower: usize,
    /// State whose row-2 gap is above the center.
    pub upper: usize,
    /// Center gap, a positive multiple of the order.
    pub center: i64,
    /// `+1` or `-1`: sign of the sine entries in the rotation.
    pub orientation: i8,
}

/// How a modified basis was obtained from the primitive one.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RotationRecord {
    pub pairs: Vec<RotatedPair>,
    /// Orientation assignments tried by the search.
    pub sign_choices_explored: u64,
    pub sign_budget: u64,
    /// Primitive states with a divergent `f_2` element, with their case.
    pub divergent_states: Vec<(usize, Case)>,
}
