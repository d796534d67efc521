//! Deterministic curve sets: images of `{(j, j², …, j^m)} ⊂ ℤ_p^m` in `ℤ^d`.

mod fourier;
mod osc;
mod primes;
mod set;
mod smoothing;

pub use fourier::{
    curve_measure, curve_transform, dft_weil_check, e, product_factorization_error, product_weil_check,
    weil_max_direct, FiniteFieldFn, ProductWeilReport, WeilReport, FINITE_FN_MAX_CELLS,
};
pub use osc::{
    block_sups, lacunary_times, osc_profile, telescoping_sum, BlockSup, FMultSums, GradientRow, OscConfig, OscProfile,
    TelescopeRow,
};
pub use primes::{is_prime, prime_schedule, primes_between, repeated_schedule, PrimeSchedule, ScheduleMode};
pub use set::{curve_point, ArithParams};
pub use smoothing::{
    curve_measure_exact, fourier_identity_error, freiman, freiman_bijective, gamma1, gamma2, gamma_transfer,
    nu_triple_l1, nu_triple_l1_materialized, random_finite_fn, smoothing_psi_l1, uniform_measure_exact, varphi,
    varphi_sum, PsiReport, TransferReport,
};
