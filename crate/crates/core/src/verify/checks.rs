//! Individual checks: the `ε₁` anchor, the conjecture band, positivity,
//! monotonicity, and the inequality property suites.

use rug::Integer;

use super::report::{CheckResult, Tally};
use crate::bounds::{
    certify, epsilon_riemann_series, exp_power_bounds, factorial_expr_bounds, floor_root_gap,
    floor_root_gap_bound, log_ratio_bounds, robbins_bounds, DeltaSeries,
};
use crate::constants::{ACCUMULATED_DELTA, EPSILON_ONE};
use crate::error::Result;
use crate::logint::{epsilon, epsilon_k, LogPoint};
use crate::numerics::{Enclosure, PrecisionConfig, Real};

const DIGITS: usize = 22;

fn s(r: &Real) -> String {
    r.to_sci_string(DIGITS)
}

/// Extra bits for direct evaluations used as oracles.
const ORACLE_GUARD: u32 = 128;

/// `e − li(e)` against the stored `ε₁` literal to `10^-15`.
pub fn verify_epsilon_one(cfg: &PrecisionConfig) -> Result<CheckResult> {
    let cfg = PrecisionConfig::new(cfg.bits().max(192))?;
    let computed = epsilon_k(1, &cfg)?;
    let stored = Real::parse(EPSILON_ONE, cfg.bits())?;
    let diff = (&computed - &stored).abs();
    let tol = 1e-15;
    let mut tally = Tally::new("epsilon-one", "|(e − li(e)) − ε₁| ≤ 1e-15");
    tally.observe(diff <= tol, tol - diff.to_f64(), 0.0, || {
        (
            s(&computed),
            s(&stored),
            format!("difference {:.3e}", diff.to_f64()),
        )
    });
    Ok(tally.finish())
}

/// `Σ δ_k` for `k = 2..=1000` against the published value to relative `10^-6`.
pub fn verify_accumulated_delta(series: &DeltaSeries) -> Result<CheckResult> {
    let published = Real::parse(ACCUMULATED_DELTA, 192)?;
    let bounds = epsilon_riemann_series(series);
    let last = bounds.last().expect("series contains n = 1");
    let acc = &last.accumulated_delta;
    let rel = ((acc - &published).abs() / &published).to_f64();
    let tol = 1e-6;
    let what = format!(
        "|Σδ_k − δ| ≤ 1e-6·δ over k = 2..={} at M = {}",
        series.k_max(),
        series.m()
    );
    let mut tally = Tally::new("accumulated-delta", what);
    tally.observe(rel <= tol, (tol - rel) * published.to_f64(), 0.0, || {
        (s(acc), s(&published), format!("relative error {rel:.3e}"))
    });
    Ok(tally.finish())
}

/// Certified `[lo, hi]` of `(1/3)√(2π/k) ± 1/(12k^{3/2})`, outer edges.
fn band(k: u64, cfg: &PrecisionConfig) -> Result<(Enclosure, Enclosure)> {
    let g = cfg.bits() + 64;
    let kr = Real::from_u64(k, g);
    let center = (&(&Real::pi(g) * &kr.lit(2.0)) / &kr).sqrt() / kr.lit(3.0);
    let half = (&(&kr * &kr.sqrt()) * &kr.lit(12.0)).recip();
    let lo = &center - &half;
    let hi = &center + &half;
    Ok((certify(&lo, 4.0, cfg)?, certify(&hi, 4.0, cfg)?))
}

/// Every certified `ε_k`, `1 ≤ k ≤ k_max`, lies strictly inside the band.
pub fn verify_conjecture_band(series: &DeltaSeries, cfg: &PrecisionConfig) -> Result<CheckResult> {
    let what = format!(
        "(1/3)√(2π/k) − 1/(12k^1.5) < ε_k < (1/3)√(2π/k) + 1/(12k^1.5) for 1 ≤ k ≤ {} at M = {}, {} bits \
         (explicit band only; the o(·) form is not checkable)",
        series.k_max(),
        series.m(),
        series.bits()
    );
    let mut tally = Tally::new("conjecture", what);
    for b in epsilon_riemann_series(series) {
        let (lo_edge, hi_edge) = band(b.n, cfg)?;
        let width = (&b.hi - &b.lo).to_f64();
        let lower_gap = (&b.lo - lo_edge.hi()).to_f64();
        let upper_gap = (hi_edge.lo() - &b.hi).to_f64();
        let ok = b.lo > *lo_edge.hi() && b.hi < *hi_edge.lo();
        tally.observe(ok, lower_gap.min(upper_gap), width, || {
            if lower_gap <= upper_gap {
                (
                    s(lo_edge.hi()),
                    s(&b.lo),
                    format!("k = {}: band lower edge < ε̲_k", b.n),
                )
            } else {
                (
                    s(&b.hi),
                    s(hi_edge.lo()),
                    format!("k = {}: ε̄_k < band upper edge", b.n),
                )
            }
        });
    }
    Ok(tally.finish())
}

/// `ε̲_n > 0` for every `n ≤ k_max`.
pub fn verify_positivity(series: &DeltaSeries) -> Result<CheckResult> {
    let what = format!("ε̲_n > 0 for 1 ≤ n ≤ {}", series.k_max());
    let mut tally = Tally::new("positivity", what);
    for b in epsilon_riemann_series(series) {
        let ok = !b.lo.is_negative() && !b.lo.is_zero();
        tally.observe(ok, b.lo.to_f64(), (&b.hi - &b.lo).to_f64(), || {
            (s(&b.lo), "0".into(), format!("n = {}", b.n))
        });
    }
    Ok(tally.finish())
}

/// `1 + 49·i/(count − 1)`, `i = 0..count`: exponents of points spread over `[e, e^50]`.
pub fn default_samples(count: usize, bits: u32) -> Vec<Real> {
    let n = count.max(2) as u64 - 1;
    (0..=n)
        .map(|i| &Real::one(bits) + &Real::ratio(49 * i as i64, n as i64, bits))
        .collect()
}

/// Strict separation `Δ_{k+1} < Δ_k` of the record enclosures and strict
/// decrease of `ε(x)` over `x = e^{t}` for the sorted exponents `sample_ln_xs`.
pub fn verify_monotonicity(
    series: &DeltaSeries,
    sample_ln_xs: &[Real],
    cfg: &PrecisionConfig,
) -> Result<CheckResult> {
    let what = format!(
        "S̄_(k+1) < S̲_k for 2 ≤ k < {} and ε(x) strictly decreasing over {} sampled x",
        series.k_max(),
        sample_ln_xs.len()
    );
    let mut tally = Tally::new("monotonicity", what);
    for pair in series.records().windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let gap = &a.s_lower - &b.s_upper;
        let width = (&a.width() + &b.width()).to_f64();
        tally.observe(b.s_upper < a.s_lower, gap.to_f64(), width, || {
            (
                s(&b.s_upper),
                s(&a.s_lower),
                format!("k = {}: S̄_{} < S̲_{}", a.k, b.k, a.k),
            )
        });
    }
    let mut prev: Option<(Real, Real)> = None;
    for t in sample_ln_xs {
        let value = epsilon(&LogPoint::from_exponent(t.clone())?, cfg)?;
        if let Some((pt, pv)) = &prev {
            let drop = pv - &value;
            tally.observe(value < *pv, drop.to_f64(), 0.0, || {
                (
                    s(&value),
                    s(pv),
                    format!(
                        "ε(e^{}) < ε(e^{})",
                        t.to_fixed_string(8),
                        pt.to_fixed_string(8)
                    ),
                )
            });
        }
        prev = Some((t.clone(), value));
    }
    Ok(tally.finish())
}

fn exact_ln_factorial(n: u64, bits: u32) -> Result<Real> {
    let f = Integer::from(Integer::factorial(n as u32));
    Ok(Real::parse(&f.to_string(), bits)?.ln())
}

/// Observes `inner ∈ enc` with the distance to the nearer edge as margin.
fn observe_containment(
    tally: &mut Tally,
    enc: &Enclosure,
    inner: &Real,
    at: impl FnOnce() -> String,
) {
    let lo_gap = (inner - enc.lo()).to_f64();
    let hi_gap = (enc.hi() - inner).to_f64();
    tally.observe(enc.contains(inner), lo_gap.min(hi_gap), 0.0, || {
        let at = at();
        if lo_gap <= hi_gap {
            (s(enc.lo()), s(inner), format!("{at}: lower ≤ value"))
        } else {
            (s(inner), s(enc.hi()), format!("{at}: value ≤ upper"))
        }
    });
}

/// Robbins' interval contains the exact `ln n!` for `1 ≤ n ≤ n_max`.
pub fn verify_robbins(n_max: u64, cfg: &PrecisionConfig) -> Result<CheckResult> {
    let w = cfg.bits() + ORACLE_GUARD;
    let mut tally = Tally::new(
        "robbins",
        format!("ln n! within Robbins' bounds for 1 ≤ n ≤ {n_max}"),
    );
    for n in 1..=n_max {
        let enc = robbins_bounds(n, cfg)?;
        let exact = exact_ln_factorial(n, w)?;
        observe_containment(&mut tally, &enc, &exact, || format!("n = {n}"));
    }
    Ok(tally.finish())
}

/// `α = i/10`, `i = 0..=10`.
fn alpha_tenths(bits: u32) -> Vec<Real> {
    (0..=10).map(|i| Real::ratio(i, 10, bits)).collect()
}

/// `n!·e^{n+α}/(n+α)^{n+1}` inside its closed-form sandwich on
/// `n ∈ 1..=n_max`, `α ∈ {0, 0.1, …, 1}`.
pub fn verify_factorial_expr(n_max: u64, cfg: &PrecisionConfig) -> Result<CheckResult> {
    let w = cfg.bits() + ORACLE_GUARD;
    let mut tally = Tally::new(
        "factorial-expr",
        format!("n!·e^(n+α)/(n+α)^(n+1) within its sandwich on n ≤ {n_max}, α ∈ {{0, 0.1, …, 1}}"),
    );
    for n in 1..=n_max {
        let ln_fact = exact_ln_factorial(n, w)?;
        for alpha in alpha_tenths(w) {
            let enc = factorial_expr_bounds(n, &alpha, cfg)?;
            let na = &Real::from_u64(n, w) + &alpha;
            let value = (&(&ln_fact + &na) - &(&Real::from_u64(n + 1, w) * &na.ln())).exp();
            observe_containment(&mut tally, &enc, &value, || {
                format!("n = {n}, α = {}", alpha.to_fixed_string(3))
            });
        }
    }
    Ok(tally.finish())
}

/// `(n+½)·ln(n/(n+α))` at `w` bits.
fn log_ratio(n: u64, alpha: &Real, w: u32) -> Real {
    let nr = Real::from_u64(n, w);
    let ratio = (&nr / &(&nr + alpha)).ln();
    &(&nr + &nr.lit(0.5)) * &ratio
}

/// `(n/(n+α))^{n+½}` inside its exponential sandwich on the same grid.
pub fn verify_exp_power(n_max: u64, cfg: &PrecisionConfig) -> Result<CheckResult> {
    let w = cfg.bits() + ORACLE_GUARD;
    let mut tally = Tally::new(
        "exp-power",
        format!("(n/(n+α))^(n+1/2) within its sandwich on n ≤ {n_max}, α ∈ {{0, 0.1, …, 1}}"),
    );
    for n in 1..=n_max {
        for alpha in alpha_tenths(w) {
            let enc = exp_power_bounds(n, &alpha, cfg)?;
            let value = log_ratio(n, &alpha, w).exp();
            observe_containment(&mut tally, &enc, &value, || {
                format!("n = {n}, α = {}", alpha.to_fixed_string(3))
            });
        }
    }
    Ok(tally.finish())
}

/// Two-sided bound on `(n+½)·ln(n/(n+α))` for `n ≤ n_max` and
/// `α = i/density`, `i = 0..=density`.
pub fn verify_log_ratio(n_max: u64, density: u64, cfg: &PrecisionConfig) -> Result<CheckResult> {
    let w = cfg.bits() + ORACLE_GUARD;
    let density = density.max(1);
    let mut tally = Tally::new(
        "log-ratio",
        format!(
            "−α − α(1−α)/(4n) − 1/(16n) ≤ (n+1/2)·ln(n/(n+α)) ≤ −α − α(1−α)/(4n) on n ≤ {n_max}, \
             {} values of α in [0, 1]",
            density + 1
        ),
    );
    for n in 1..=n_max {
        for i in 0..=density {
            let alpha = Real::ratio(i as i64, density as i64, w);
            let enc = log_ratio_bounds(n, &alpha, cfg)?;
            let value = log_ratio(n, &alpha, w);
            observe_containment(&mut tally, &enc, &value, || {
                format!("n = {n}, α = {}", alpha.to_fixed_string(6))
            });
        }
    }
    Ok(tally.finish())
}

/// Integer parts used by the floor-root grids.
pub const FLOOR_GRID: [u64; 10] = [1, 2, 3, 5, 10, 20, 50, 100, 1000, 10_000];

/// Offset by which open grid endpoints are pulled inside.
const ENDPOINT_SHRINK: f64 = 1e-6;

/// `θ = i/density`, `i = 0..density`, and `1 − 10^-6`.
fn theta_grid(density: u64, bits: u32) -> Vec<Real> {
    let mut out: Vec<Real> = (0..density)
        .map(|i| Real::ratio(i as i64, density as i64, bits))
        .collect();
    out.push(Real::one(bits) - Real::from_f64(ENDPOINT_SHRINK, bits));
    out
}

fn floor_root_grid(density: u64, w: u32) -> Result<Vec<(u64, Real, LogPoint)>> {
    let mut out = Vec::new();
    for floor in FLOOR_GRID {
        for theta in theta_grid(density.max(1), w) {
            let t = &Real::from_u64(floor, w) + &theta;
            out.push((floor, theta, LogPoint::from_exponent(t)?));
        }
    }
    Ok(out)
}

/// `|1/√⌊ln x⌋ − 1/√ln x| ≤ 1/(2(ln x)^{3/2})` with `ln x = F + θ`.
pub fn verify_floor_root_gap(density: u64, cfg: &PrecisionConfig) -> Result<CheckResult> {
    let w = cfg.bits() + ORACLE_GUARD;
    let wide = PrecisionConfig::new(w)?;
    let mut tally = Tally::new("appendix-a", "|1/√⌊ln x⌋ − 1/√ln x| ≤ 1/(2(ln x)^1.5)");
    for (floor, theta, point) in floor_root_grid(density, w)? {
        let gap = floor_root_gap(&point, &wide)?;
        let bound = floor_root_gap_bound(&point, &wide)?;
        tally.observe(gap <= bound, (&bound - &gap).to_f64(), 0.0, || {
            (
                s(&gap),
                s(&bound),
                format!("ln x = {} + {}", floor, theta.to_fixed_string(8)),
            )
        });
    }
    Ok(tally.finish())
}

/// The same gap against `1/(2⌊ln x⌋^{3/2})`, which the mean value theorem gives.
pub fn verify_floor_root_gap_floor(density: u64, cfg: &PrecisionConfig) -> Result<CheckResult> {
    let w = cfg.bits() + ORACLE_GUARD;
    let wide = PrecisionConfig::new(w)?;
    let mut tally = Tally::new(
        "appendix-a-floor",
        "|1/√⌊ln x⌋ − 1/√ln x| ≤ 1/(2⌊ln x⌋^1.5) (informational)",
    );
    for (floor, theta, point) in floor_root_grid(density, w)? {
        let gap = floor_root_gap(&point, &wide)?;
        let f = Real::from_u64(floor, w);
        let bound = (&(&f * &f.sqrt()) * &f.lit(2.0)).recip();
        tally.observe(gap <= bound, (&bound - &gap).to_f64(), 0.0, || {
            (
                s(&gap),
                s(&bound),
                format!("ln x = {} + {}", floor, theta.to_fixed_string(8)),
            )
        });
    }
    Ok(tally.finish())
}

/// Largest `m` in the exponential-series suites.
pub const SERIES_M_MAX: u64 = 6;

/// `Σ_{k=0}^{last} x^k/k!`; empty (zero) when `last < 0`.
fn partial_exp(x: &Real, last: i64) -> Real {
    let mut term = x.lit(1.0);
    let mut sum = x.lit(0.0);
    for k in 0..=last {
        if k > 0 {
            term = &(&term * x) / &Real::from_i64(k, x.bits());
        }
        sum = &sum + &term;
    }
    sum
}

fn factorial(n: u64, bits: u32) -> Real {
    (1..=n).fold(Real::one(bits), |acc, i| &acc * &Real::from_u64(i, bits))
}

/// `count + 1` evenly spaced points from `a` to `b`.
fn linspace(a: f64, b: f64, count: u64, bits: u32) -> Vec<Real> {
    let a = Real::from_f64(a, bits);
    let span = &Real::from_f64(b, bits) - &a;
    (0..=count)
        .map(|i| &a + &(&span * &Real::ratio(i as i64, count as i64, bits)))
        .collect()
}

fn series_check(
    name: &'static str,
    what: &str,
    xs: Vec<Real>,
    lhs: impl Fn(&Real, u64) -> Real,
    rhs: impl Fn(&Real, u64) -> Real,
) -> CheckResult {
    let mut tally = Tally::new(name, format!("{what} for 0 ≤ m ≤ {SERIES_M_MAX}"));
    for x in &xs {
        for m in 0..=SERIES_M_MAX {
            let l = lhs(x, m);
            let r = rhs(x, m);
            tally.observe(l <= r, (&r - &l).to_f64(), 0.0, || {
                (
                    s(&l),
                    s(&r),
                    format!("x = {}, m = {m}", x.to_fixed_string(8)),
                )
            });
        }
    }
    tally.finish()
}

/// The three exponential-series inequalities on their stated domains,
/// and the upper one restricted to `[0, 1)`.
pub fn verify_exp_series(density: u64, cfg: &PrecisionConfig) -> Vec<CheckResult> {
    let w = cfg.bits() + ORACLE_GUARD;
    let d = density.max(1);
    let near_one = 1.0 - ENDPOINT_SHRINK;
    let upper = |x: &Real, m: u64| {
        let tail = &x.powi(2 * m as i32) / &(&(&x.lit(1.0) - x) * &factorial(2 * m, w));
        &partial_exp(x, 2 * m as i64 - 1) + &tail
    };
    vec![
        series_check(
            "appendix-b-partial-sum",
            "Σ_{k≤m} x^k/k! ≤ e^x on [0, 1]",
            linspace(0.0, 1.0, d, w),
            |x, m| partial_exp(x, m as i64),
            |x, _| x.exp(),
        ),
        series_check(
            "appendix-b-even-partial-sum",
            "Σ_{k<2m} x^k/k! ≤ e^x on (−1, 0]",
            linspace(-near_one, 0.0, d, w),
            |x, m| partial_exp(x, 2 * m as i64 - 1),
            |x, _| x.exp(),
        ),
        series_check(
            "appendix-b-geometric",
            "e^x ≤ Σ_{k<2m} x^k/k! + x^(2m)/((1−x)(2m)!) on (−1, 1)",
            linspace(-near_one, near_one, 2 * d, w),
            |x, _| x.exp(),
            upper,
        ),
        series_check(
            "appendix-b-geometric-nonneg",
            "e^x ≤ Σ_{k<2m} x^k/k! + x^(2m)/((1−x)(2m)!) on [0, 1) (informational)",
            linspace(0.0, near_one, d, w),
            |x, _| x.exp(),
            upper,
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{sweep, DeltaRecord};
    use crate::verify::report::Status;

    fn series(k_max: u64, m: u64) -> DeltaSeries {
        let ks: Vec<u64> = (2..=k_max).collect();
        DeltaSeries::new(sweep(&ks, m, &PrecisionConfig::fast()).unwrap(), k_max).unwrap()
    }

    #[test]
    fn epsilon_one_passes() {
        let r = verify_epsilon_one(&PrecisionConfig::standard()).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert!(r.margin.unwrap() > 9e-16);
    }

    #[test]
    fn band_at_one_contains_anchor() {
        let (lo, hi) = band(1, &PrecisionConfig::standard()).unwrap();
        assert!((lo.lo().to_f64() - 0.752209424878).abs() < 1e-11);
        assert!((hi.hi().to_f64() - 0.918876091545).abs() < 1e-11);
    }

    #[test]
    fn small_band_and_positivity_pass() {
        let s = series(30, 20_000);
        let cfg = PrecisionConfig::standard();
        assert!(!verify_conjecture_band(&s, &cfg)
            .unwrap()
            .status
            .is_failure());
        assert!(!verify_positivity(&s).unwrap().status.is_failure());
    }

    #[test]
    fn inflated_upper_sum_breaks_positivity() {
        let s = series(5, 2_000);
        let mut recs: Vec<DeltaRecord> = s.records().to_vec();
        recs[2].s_upper = &recs[2].s_upper + &recs[2].s_upper.lit(1.0);
        let bad = DeltaSeries::new(recs, 5).unwrap();
        let r = verify_positivity(&bad).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.margin.unwrap() < 0.0);
        assert!(r.detail.contains("violated at 2 of 5"), "{}", r.detail);
    }

    #[test]
    fn equal_adjacent_records_break_monotonicity() {
        let s = series(6, 2_000);
        let mut recs: Vec<DeltaRecord> = s.records().to_vec();
        let copy = recs[1].clone();
        recs[2] = DeltaRecord {
            k: recs[2].k,
            ..copy
        };
        let bad = DeltaSeries::new(recs, 6).unwrap();
        let r = verify_monotonicity(&bad, &[], &PrecisionConfig::fast()).unwrap();
        assert_eq!(r.status, Status::Fail);
        let good = verify_monotonicity(
            &s,
            &default_samples(5, 128),
            &PrecisionConfig::new(128).unwrap(),
        )
        .unwrap();
        assert!(!good.status.is_failure(), "{good:?}");
    }

    #[test]
    fn stirling_suites_pass_on_small_grids() {
        let cfg = PrecisionConfig::standard();
        assert_eq!(verify_robbins(30, &cfg).unwrap().status, Status::Pass);
        assert!(!verify_factorial_expr(5, &cfg).unwrap().status.is_failure());
        assert!(!verify_exp_power(5, &cfg).unwrap().status.is_failure());
        assert!(!verify_log_ratio(5, 8, &cfg).unwrap().status.is_failure());
    }

    #[test]
    fn exp_series_examples() {
        let w = 256;
        let one = Real::one(w);
        // 1 + 1 + 1/2 + 1/6 ≤ e
        assert!(partial_exp(&one, 3) < one.exp());
        assert!((partial_exp(&one, 3).to_f64() - 8.0 / 3.0).abs() < 1e-15);
        assert!(partial_exp(&one, -1).is_zero());
        let checks = verify_exp_series(20, &PrecisionConfig::standard());
        let status: Vec<Status> = checks.iter().map(|c| c.status).collect();
        assert_eq!(status[0], Status::Pass);
        assert_eq!(status[1], Status::Pass);
        assert_eq!(status[2], Status::Fail);
        assert_eq!(status[3], Status::Pass);
    }

    #[test]
    fn floor_root_stated_bound_fails_where_fraction_is_large() {
        let cfg = PrecisionConfig::standard();
        let stated = verify_floor_root_gap(10, &cfg).unwrap();
        assert_eq!(stated.status, Status::Fail);
        assert!(stated.detail.contains("ln x = 1 +"));
        let corrected = verify_floor_root_gap_floor(10, &cfg).unwrap();
        assert!(!corrected.status.is_failure());
    }
}
