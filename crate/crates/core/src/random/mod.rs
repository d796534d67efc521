//! Random sparse sets on `ℤ^d`: speckled shells and plaid products.

mod dense;
mod plaid;
mod profile;
mod sequence;
mod speckled;
mod weak;

pub use dense::ols_slope;
pub use plaid::{
    pattern, plaid_coin, plaid_correlation, plaid_profile, sample_plaid, PatternSlope, PlaidConfig, PlaidDecomposition,
    PlaidProfile, PlaidRow, PlaidSample, PLAID_MATERIALIZE_CELLS,
};
pub use profile::{
    speckled_correlation, speckled_profile, speckled_profile_row, CancellationProfile, ProfileRow, SPECKLED_MAX_CELLS,
};
pub use sequence::{enumerate_plaid_sequence, enumerate_sequence, norm_then_lex};
pub use speckled::{sample_speckled, speckled_contains, speckled_expected_mass, SpeckledConfig, SpeckledSample};
pub use weak::{
    adversarial_test, cube_test, delta_test, dyadic_lambdas, speckled_family, weak11_sweep, WeakRow, WeakSweep,
};
