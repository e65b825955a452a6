//! Finite-stage computation on Toeplitz sequences presented as skeleton towers.
//!
//! A [`SkeletonTower`] is a divisibility chain of periods with partial cyclic
//! words; it stands for the set of all its completions. Every certified answer
//! produced here holds for all completions.

pub mod codes;
pub mod conjugacy;
pub mod error;
pub mod odometer;
pub mod oracle;
pub mod sample;
pub mod skeleton;
pub mod tower;

pub use codes::{apply_block_code, apply_positionwise_permutation, BlockCode, PositionwisePermutation};
pub use error::{Error, Result};
pub use odometer::{
    divides, odometer_add, odometers_conjugate, psi_coordinates, supernatural_equal, supernatural_lcm,
    Exponent, OdometerPoint, SupernaturalNumber,
};
pub use skeleton::{
    essential_period_status, filled_blocks, growth_profile, growth_profile_along, natural_factorization,
    periodic_part, scale_factor_certified, scale_truncation, skeleton_word, BlockLength, BlockScan, BlockSpan, EssentialStatus,
    GrowthProfile, LevelGrowth, ResidueStatus, ResidueStatusSet, ScaleTruncation, SkeletonView, Trend,
};
pub use tower::{
    rotate_tower, symbol_at, validate_tower, Alphabet, Cell, Level, PartialCyclicWord, RawTower, SkeletonTower,
    Symbol, BLANK,
};
pub use conjugacy::{
    chi_stage, conjugacy_verdict, dp_equivalent, efin_equal, efin_from_edges, gamma_map, invariant_compare,
    parts_star, ChiStage, Correspondence, DpResult, EdgeStatus, EfinResult, GammaConflict, GammaResult,
    InvariantReport, InvariantSummary, NegativeReason, Part, StageOutcome, StarStatus, StarredResidue, Verdict,
};
pub use oracle::{
    apply_code_periodic, efin_brute_force, exact_conjugacy_search, exact_periodic_analysis, in_period_set, ConjugacyWitness,
    ExactAnalysis, PeriodicWord,
};
