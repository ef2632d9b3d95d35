//! Robbins' refinement of Stirling's formula and the sandwiches derived
//! from it.

use super::{certify, guard_bits};
use crate::error::{Error, Result};
use crate::numerics::{Enclosure, PrecisionConfig, Real, LN_FACTORIAL_MAX};

fn check_n(op: &'static str, n: u64) -> Result<()> {
    if !(1..=LN_FACTORIAL_MAX as u64).contains(&n) {
        return Err(Error::domain(
            op,
            format!("n must be in 1..={LN_FACTORIAL_MAX}, got {n}"),
        ));
    }
    Ok(())
}

fn check_alpha(op: &'static str, alpha: &Real) -> Result<()> {
    if alpha.is_negative() || *alpha > 1.0 {
        return Err(Error::domain(
            op,
            format!("alpha must lie in [0, 1], got {alpha:.20}"),
        ));
    }
    Ok(())
}

/// `ln` of `[√(2πn)(n/e)ⁿ e^{1/(12n+1)}, √(2πn)(n/e)ⁿ e^{1/(12n)}]`, which
/// encloses `ln n!`.
pub fn robbins_bounds(n: u64, cfg: &PrecisionConfig) -> Result<Enclosure> {
    check_n("robbins_bounds", n)?;
    let g = guard_bits(cfg);
    let nr = Real::from_u64(n, g);
    let two_pi_n = &(&Real::pi(g) * &nr.lit(2.0)) * &nr;
    let base = &(&(two_pi_n.ln() / nr.lit(2.0)) + &(&nr * &nr.ln())) - &nr;
    let lo = &base + &Real::one(g) / Real::from_u64(12 * n + 1, g);
    let hi = &base + &Real::one(g) / Real::from_u64(12 * n, g);
    let scale = 4.0 * (n as f64) * (n as f64).ln().max(1.0) + 8.0;
    let lo = certify(&lo, scale, cfg)?;
    let hi = certify(&hi, scale, cfg)?;
    Enclosure::new(lo.lo().clone(), hi.hi().clone())
}

/// Common factor `α(1−α)/(4n)`.
fn alpha_term(n: &Real, alpha: &Real) -> Real {
    &(alpha * &(&alpha.lit(1.0) - alpha)) / &(n * &n.lit(4.0))
}

/// Enclosure of `n!·e^{n+α} / (n+α)^{n+1}`:
/// `√(2π)/√(n+α) · [e^{1/(12n+1) − 1/(16n) − α(1−α)/(4n)}, e^{1/(12n) − α(1−α)/(4n)}]`.
pub fn factorial_expr_bounds(n: u64, alpha: &Real, cfg: &PrecisionConfig) -> Result<Enclosure> {
    check_n("factorial_expr_bounds", n)?;
    check_alpha("factorial_expr_bounds", alpha)?;
    let g = guard_bits(cfg);
    let nr = Real::from_u64(n, g);
    let a = alpha.with_bits(g);
    let shared = alpha_term(&nr, &a);
    let prefactor = (&(&Real::pi(g) * &nr.lit(2.0)) / &(&nr + &a)).sqrt();
    let lo_exp = &(&(Real::one(g) / Real::from_u64(12 * n + 1, g))
        - &(Real::one(g) / Real::from_u64(16 * n, g)))
        - &shared;
    let hi_exp = &(Real::one(g) / Real::from_u64(12 * n, g)) - &shared;
    let lo = &prefactor * &lo_exp.exp();
    let hi = &prefactor * &hi_exp.exp();
    let lo = certify(&lo, 16.0 * lo.to_f64(), cfg)?;
    let hi = certify(&hi, 16.0 * hi.to_f64(), cfg)?;
    Enclosure::new(lo.lo().clone(), hi.hi().clone())
}

/// `[−α − α(1−α)/(4n) − 1/(16n), −α − α(1−α)/(4n)]`, enclosing
/// `(n + ½)·ln(n/(n+α))`.
pub fn log_ratio_bounds(n: u64, alpha: &Real, cfg: &PrecisionConfig) -> Result<Enclosure> {
    check_n("log_ratio_bounds", n)?;
    check_alpha("log_ratio_bounds", alpha)?;
    let g = guard_bits(cfg);
    let nr = Real::from_u64(n, g);
    let a = alpha.with_bits(g);
    let hi = -(&a + &alpha_term(&nr, &a));
    let lo = &hi - &(Real::one(g) / Real::from_u64(16 * n, g));
    let lo = certify(&lo, 4.0, cfg)?;
    let hi = certify(&hi, 4.0, cfg)?;
    Enclosure::new(lo.lo().clone(), hi.hi().clone())
}

/// Exponential of [`log_ratio_bounds`], enclosing `(n/(n+α))^{n+½}`.
pub fn exp_power_bounds(n: u64, alpha: &Real, cfg: &PrecisionConfig) -> Result<Enclosure> {
    check_n("exp_power_bounds", n)?;
    check_alpha("exp_power_bounds", alpha)?;
    let g = guard_bits(cfg);
    let nr = Real::from_u64(n, g);
    let a = alpha.with_bits(g);
    let hi_exp = -(&a + &alpha_term(&nr, &a));
    let lo_exp = &hi_exp - &(Real::one(g) / Real::from_u64(16 * n, g));
    let lo = lo_exp.exp();
    let hi = hi_exp.exp();
    let lo = certify(&lo, 8.0 * lo.to_f64(), cfg)?;
    let hi = certify(&hi, 8.0 * hi.to_f64(), cfg)?;
    Enclosure::new(lo.lo().clone(), hi.hi().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Integer;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::standard()
    }

    fn exact_ln_factorial(n: u32) -> Real {
        let f = Integer::from(Integer::factorial(n));
        Real::parse(&f.to_string(), 512).unwrap().ln()
    }

    #[test]
    fn robbins_examples() {
        assert!(robbins_bounds(1, &cfg())
            .unwrap()
            .contains(&Real::zero(192)));
        for n in [5u32, 20] {
            let b = robbins_bounds(u64::from(n), &cfg()).unwrap();
            assert!(b.contains(&exact_ln_factorial(n).with_bits(192)), "n = {n}");
        }
        assert!(robbins_bounds(0, &cfg()).is_err());
    }

    #[test]
    fn factorial_expr_examples() {
        let half = Real::from_f64(0.5, 192);
        let b = factorial_expr_bounds(3, &half, &cfg()).unwrap();
        let v = Real::parse(
            "1.32406638402101712622353683366818290882019404820569859847",
            192,
        )
        .unwrap();
        assert!(b.contains(&v));

        let one = Real::one(192);
        let b = factorial_expr_bounds(1, &one, &cfg()).unwrap();
        let v = &Real::from_i64(2, 192).exp() / &Real::from_i64(4, 192);
        assert!(b.contains(&v));

        assert!(factorial_expr_bounds(1, &Real::from_f64(1.5, 192), &cfg()).is_err());
    }

    #[test]
    fn factorial_expr_at_zero_alpha_is_robbins_scaled() {
        for n in [1u64, 9, 100] {
            let e = factorial_expr_bounds(n, &Real::zero(192), &cfg()).unwrap();
            let r = robbins_bounds(n, &cfg()).unwrap();
            // At α = 0 the middle expression is n!·eⁿ/n^{n+1}.
            let nr = Real::from_u64(n, 192);
            let shift = &nr - &(&Real::from_u64(n + 1, 192) * &nr.ln());
            let scaled_hi = (r.hi() + &shift).exp();
            assert!((&scaled_hi - e.hi()).abs() < &scaled_hi * &scaled_hi.lit(1e-50));
        }
    }

    #[test]
    fn exp_power_examples() {
        let b = exp_power_bounds(4, &Real::zero(192), &cfg()).unwrap();
        assert!(b.contains(&Real::one(192)));
        assert!(*b.hi() >= 1.0);

        let b = exp_power_bounds(1, &Real::one(192), &cfg()).unwrap();
        assert!(b.contains(&Real::from_f64(0.125, 192).sqrt()));

        let b = exp_power_bounds(10, &Real::from_f64(0.5, 192), &cfg()).unwrap();
        let v = Real::parse(
            "0.599117988914498418599991792636880744480851195964352155",
            192,
        )
        .unwrap();
        assert!(b.contains(&v));
    }

    #[test]
    fn log_ratio_at_zero_alpha() {
        for n in [1u64, 50] {
            let b = log_ratio_bounds(n, &Real::zero(192), &cfg()).unwrap();
            assert!(b.contains(&Real::zero(192)));
            let floor = -1.0 / (16.0 * n as f64);
            assert!((b.lo().to_f64() - floor).abs() < 1e-15);
        }
    }
}
