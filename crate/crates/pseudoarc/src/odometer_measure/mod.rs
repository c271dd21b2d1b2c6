//! Exact 2-adic odometer arithmetic, Haar measures of residue sets, and the
//! positive-measure Cantor set `K` with its finite checks.

mod construction;
mod point;
pub mod residue;
mod words;

pub use construction::{
    a1c_helper, build_k, check_lemma51, direct_filter_measure, displayed_bound, inclusion_exclusion_measure,
    measure_lower_bound, sorted_intersection, validate_kseq, window_bounds, KConstruction, LambdaLevel,
    Lemma51Report, MeasureComparison, PointExtensions, ENUM_BUDGET, MAX_BITS,
};
pub use point::{add, add_one, OdometerPoint};
pub use residue::{Constraint, ResidueSet, ResidueUnion};
pub use words::{growth_rate, marker_word_count, marker_words, Word, EXPLICIT_PERIOD};

/// Cylinder sets are residue sets at their level.
pub type CylinderSet = ResidueSet;
