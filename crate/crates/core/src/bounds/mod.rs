//! Bounding formulas: Riemann enclosures of `Δ_k`, closed-form factorial
//! sandwiches, and telescoped enclosures of `ε_n`.

pub mod cache;
pub mod delta;
pub mod epsilon;
pub mod riemann;
pub mod stirling;

pub use cache::{DeltaCache, CACHE_ENV};
pub use delta::{delta_k_general, delta_k_riemann, delta_k_simple, f_integral, sweep, DeltaRecord};
pub use epsilon::{
    epsilon_n_riemann, epsilon_n_simple, epsilon_one_anchor, epsilon_riemann_series,
    epsilon_x_bounds, explicit_envelope, floor_root_gap, floor_root_gap_bound, kappa_tau,
    DeltaSeries, EpsilonBound, EpsilonMethod, KappaTau,
};
pub use riemann::{riemann_enclosure, FnIntegrand, Integrand, Peak};
pub use stirling::{exp_power_bounds, factorial_expr_bounds, log_ratio_bounds, robbins_bounds};

use crate::numerics::{Enclosure, PrecisionConfig, Real};
use crate::Result;

/// Extra bits used to evaluate short closed-form chains.
pub(crate) const CLOSED_FORM_GUARD: u32 = 64;

/// Working precision for closed forms destined for `cfg`.
pub(crate) fn guard_bits(cfg: &PrecisionConfig) -> u32 {
    cfg.bits() + CLOSED_FORM_GUARD
}

/// Encloses a short chain evaluated at [`guard_bits`].
///
/// `scale` must dominate the sum of magnitudes of the chain's intermediate
/// terms (for an exponential, `|value|·(1 + |exponent|)`). The chain's
/// accumulated error is below `100·2^(1−g)·scale` for fewer than fifty
/// operations, far inside the radius `2^(−p−24)·scale` used here.
pub(crate) fn certify(value: &Real, scale: f64, cfg: &PrecisionConfig) -> Result<Enclosure> {
    let radius = Real::from_f64(
        scale.abs() * 2f64.powi(-(cfg.bits() as i32) - 24),
        value.bits(),
    );
    Ok(crate::numerics::widen_outward(value, &radius)?.with_bits(cfg.bits()))
}
