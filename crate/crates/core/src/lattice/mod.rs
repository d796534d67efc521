//! Sparse measures on ℤ^d, convolution, dyadic cubes and the
//! Calderón–Zygmund decomposition with its height splits.

mod cz;
mod measure;
mod point;
mod scalar;
mod split;

pub use cz::{cz_decompose, CzCheck, CzDecomposition, DyadicCube};
pub use measure::{MeasureStats, SparseMeasure, DEFAULT_MAX_PAIRS};
pub use point::{shell_index, shell_size, LatticePoint};
pub use scalar::{rat, Rational, Scalar};
pub use split::{
    plaid_threshold, proper_subsets, speckled_threshold, split_by_height, split_level, HeightSplit, SplitCheck,
    SplitVariant,
};
