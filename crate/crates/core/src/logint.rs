//! The logarithmic integral, its truncated asymptotic expansions, and the
//! Stieltjes approximation error `ε(x) = li*(x) − li(x)`.

use crate::constants::EULER_GAMMA;
use crate::error::{Error, Result};
use crate::numerics::{CompensatedSum, PrecisionConfig, Real};

/// Guard bits added to every internal chain in this module.
const GUARD_BITS: u32 = 32;
const LOG2_E: f64 = std::f64::consts::LOG2_E;
/// Largest truncation length accepted by [`li_n`].
pub const LI_N_MAX_TERMS: u64 = 10_000;

#[derive(Clone, Debug)]
enum Source {
    Value(Real),
    Exponent(Real),
}

/// An argument `x`, given either directly or through its logarithm.
///
/// Points built from an exponent keep `ln x` exact at every precision,
/// which makes `x = e^k` carry a fractional part of exactly zero.
#[derive(Clone, Debug)]
pub struct LogPoint {
    source: Source,
}

impl LogPoint {
    pub fn from_value(x: Real) -> Result<LogPoint> {
        let x = x.finite("point")?;
        Ok(LogPoint {
            source: Source::Value(x),
        })
    }

    pub fn from_exponent(ln_x: Real) -> Result<LogPoint> {
        let ln_x = ln_x.finite("point")?;
        Ok(LogPoint {
            source: Source::Exponent(ln_x),
        })
    }

    /// `x = e^k` with `ln x = k` exactly.
    pub fn from_integer_exponent(k: i64) -> LogPoint {
        LogPoint {
            source: Source::Exponent(Real::from_i64(k, 64)),
        }
    }

    pub fn is_exponent(&self) -> bool {
        matches!(self.source, Source::Exponent(_))
    }

    pub fn x(&self, bits: u32) -> Result<Real> {
        match &self.source {
            Source::Value(x) => Ok(x.with_bits(bits)),
            Source::Exponent(k) => k.with_bits(bits).exp().finite("point"),
        }
    }

    /// `ln x`; a domain error when `x ≤ 0`.
    pub fn ln_x(&self, bits: u32) -> Result<Real> {
        match &self.source {
            Source::Value(x) => {
                if x.is_negative() || x.is_zero() {
                    return Err(Error::domain("ln", format!("x must be positive, got {x}")));
                }
                x.with_bits(bits).ln().finite("ln")
            }
            Source::Exponent(k) => Ok(k.with_bits(bits)),
        }
    }

    /// `ln x`, requiring `x ≥ e`.
    ///
    /// A value equal to `e` at the working precision may have a logarithm a
    /// few ulps below one; it is snapped to exactly one.
    pub fn ln_x_at_least_e(&self, op: &'static str, bits: u32) -> Result<Real> {
        let ln_x = self.ln_x(bits)?;
        if ln_x >= 1.0 {
            return Ok(ln_x);
        }
        if let Source::Value(x) = &self.source {
            if x.with_bits(bits) >= Real::e(bits) {
                return Ok(Real::one(bits));
            }
        }
        Err(Error::domain(
            op,
            format!("x must be at least e (ln x = {ln_x:.20})"),
        ))
    }

    fn describe(&self) -> String {
        match &self.source {
            Source::Value(x) => format!("x = {x:.20}"),
            Source::Exponent(k) => format!("x = e^{k:.20}"),
        }
    }
}

/// Integer and fractional parts of `ln x` used by the approximations.
#[derive(Clone, Debug)]
pub struct TruncationIndex {
    /// `⌊ln x⌋`.
    pub n_star: u64,
    /// `ln x − n_star`, in `[0, 1)`.
    pub alpha: Real,
    /// `⌈ln x⌉ − 1`; differs from `n_star` only when `ln x` is an integer.
    pub n_x: u64,
}

impl TruncationIndex {
    pub fn from_ln(ln_x: &Real) -> Result<TruncationIndex> {
        if *ln_x < 1.0 {
            return Err(Error::domain(
                "truncation_index",
                format!("ln x must be at least 1, got {ln_x:.20}"),
            ));
        }
        let n_star = ln_x
            .to_i64_floor()
            .ok_or_else(|| Error::range("truncation_index", "ln x too large"))?
            as u64;
        let alpha = ln_x - &Real::from_u64(n_star, ln_x.bits());
        let n_x = if alpha.is_zero() { n_star - 1 } else { n_star };
        Ok(TruncationIndex { n_star, alpha, n_x })
    }

    pub fn of(point: &LogPoint, bits: u32) -> Result<TruncationIndex> {
        TruncationIndex::from_ln(&point.ln_x_at_least_e("truncation_index", bits)?)
    }
}

/// Euler–Mascheroni constant at `bits` precision.
pub fn euler_gamma(bits: u32) -> Real {
    Real::parse(EULER_GAMMA, bits).expect("constant literal parses")
}

/// `Ei(y)` by its everywhere-convergent series, for `y ≠ 0`.
fn ei(y: &Real, bits: u32) -> Result<Real> {
    let magnitude = y.abs().to_f64();
    let boost = if y.is_negative() {
        (magnitude * LOG2_E).ceil() as u32
    } else {
        0
    };
    let w = bits + 24 + boost;
    let y = y.with_bits(w);
    let threshold = Real::from_f64(2f64.powi(-(w as i32) - 8), w);
    let max_terms = (4.0 * magnitude) as u64 + u64::from(w) + 100;

    let mut power = Real::one(w);
    let mut sum = CompensatedSum::new(w);
    let mut small_run = 0;
    for k in 1..=max_terms {
        let kk = Real::from_u64(k, w);
        power = &(&power * &y) / &kk;
        let term = &power / &kk;
        sum.add(&term);
        let tiny = term.abs() < &threshold * &sum.value().abs();
        small_run = if tiny && (k as f64) > magnitude {
            small_run + 1
        } else {
            0
        };
        if small_run == 3 {
            let value = euler_gamma(w) + y.abs().ln() + sum.value();
            return value.with_bits(bits).finite("li");
        }
    }
    Err(Error::range("li", "series did not converge"))
}

/// Principal value of `∫₀ˣ dt / ln t`; `li(0) = 0`.
pub fn li(point: &LogPoint, cfg: &PrecisionConfig) -> Result<Real> {
    let bits = cfg.bits();
    if let Source::Value(x) = &point.source {
        if x.is_zero() {
            return Ok(Real::zero(bits));
        }
        if x.is_negative() {
            return Err(Error::domain(
                "li",
                format!("x must be non-negative, got {x}"),
            ));
        }
    }
    let w = bits + GUARD_BITS;
    let y = point.ln_x(w)?;
    if y.is_zero() {
        return Err(Error::domain("li", "x = 1 is the singularity of li"));
    }
    ei(&y, w).map(|v| v.with_bits(bits))
}

/// `(x / ln x) Σ_{k<n} k! / ln^k x` evaluated at `w` bits with `ln x` given.
fn li_n_at(x_ln: &Real, n: u64, w: u32) -> Result<Real> {
    let ln_ln = x_ln.ln();
    let mut ln_fact = Real::zero(w);
    let mut sum = CompensatedSum::new(w);
    for k in 0..n {
        if k >= 2 {
            ln_fact = &ln_fact + &Real::from_u64(k, w).ln();
        }
        let exponent = x_ln - &(&Real::from_u64(k + 1, w) * &ln_ln) + &ln_fact;
        sum.add(&exponent.exp());
    }
    sum.value().finite("li_n")
}

/// Truncated asymptotic expansion with `n` terms; requires `x ≥ e`.
pub fn li_n(point: &LogPoint, n: u64, cfg: &PrecisionConfig) -> Result<Real> {
    if !(1..=LI_N_MAX_TERMS).contains(&n) {
        return Err(Error::domain(
            "li_n",
            format!("n must be in 1..={LI_N_MAX_TERMS}, got {n}"),
        ));
    }
    let w = cfg.bits() + GUARD_BITS;
    let ln_x = point.ln_x_at_least_e("li_n", w)?;
    li_n_at(&ln_x, n, w)?.with_bits(cfg.bits()).finite("li_n")
}

fn li_star_at(point: &LogPoint, w: u32) -> Result<Real> {
    let ln_x = point.ln_x_at_least_e("li_star", w)?;
    let idx = TruncationIndex::from_ln(&ln_x)?;
    let head = li_n_at(&ln_x, idx.n_star, w)?;
    if idx.alpha.is_zero() {
        return Ok(head);
    }
    let ln_fact = crate::numerics::ln_factorial(idx.n_star as i64, &PrecisionConfig::new(w)?)?;
    let exponent = &ln_x - &(&Real::from_u64(idx.n_star + 1, w) * &ln_x.ln()) + &ln_fact;
    Ok(&head + &(&idx.alpha * &exponent.exp()))
}

/// Stieltjes approximation, truncated at `⌊ln x⌋` terms plus the
/// fractional remainder term; requires `x ≥ e`.
pub fn li_star(point: &LogPoint, cfg: &PrecisionConfig) -> Result<Real> {
    if point.ln_x(cfg.bits())? > 1.0e4 {
        return Err(Error::domain("li_star", "ln x must be at most 10^4"));
    }
    li_star_at(point, cfg.bits() + GUARD_BITS)?
        .with_bits(cfg.bits())
        .finite("li_star")
}

/// `ε(x) = li*(x) − li(x)` for `x ≥ e`.
///
/// Both terms grow like `x / ln x` while their difference stays below one,
/// so the working precision is raised by `log₂ x` bits.
pub fn epsilon(point: &LogPoint, cfg: &PrecisionConfig) -> Result<Real> {
    let ln_x = point.ln_x_at_least_e("epsilon", 64)?;
    if ln_x > 1.0e4 {
        return Err(Error::domain(
            "epsilon",
            format!("ln x must be at most 10^4 ({})", point.describe()),
        ));
    }
    let w = cfg.bits() + (ln_x.to_f64() * LOG2_E).ceil() as u32 + GUARD_BITS;
    let wide = PrecisionConfig::new(w)?;
    let value = &li_star_at(point, w)? - &li(point, &wide)?;
    value.with_bits(cfg.bits()).finite("epsilon")
}

/// `ε_k = ε(e^k)` with `ln x = k` exact.
pub fn epsilon_k(k: i64, cfg: &PrecisionConfig) -> Result<Real> {
    if k < 1 {
        return Err(Error::domain(
            "epsilon_k",
            format!("k must be at least 1, got {k}"),
        ));
    }
    epsilon(&LogPoint::from_integer_exponent(k), cfg)
}
