//! Two-sided Riemann-sum enclosures for non-negative unimodal integrands.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{
    chunked_sum, unit_roundoff, Dir, Enclosure, PrecisionConfig, Real, WideningPolicy, SUM_CHUNK,
};

/// A function evaluated together with a bound on its relative error.
///
/// The bound must also cover evaluating at any point within four units of
/// roundoff (relative) of the requested one, since grid nodes are rounded.
pub trait Integrand: Sync {
    fn eval(&self, u: &Real) -> Result<(Real, f64)>;

    /// Optional native-double evaluation used when the configuration is 53 bits.
    fn eval_f64(&self, _u: f64) -> Option<(f64, f64)> {
        None
    }
}

/// Adapts a closure to [`Integrand`].
pub struct FnIntegrand<F>(pub F);

impl<F> Integrand for FnIntegrand<F>
where
    F: Fn(&Real) -> Result<(Real, f64)> + Sync,
{
    fn eval(&self, u: &Real) -> Result<(Real, f64)> {
        (self.0)(u)
    }
}

/// Location of the maximum and a certified upper bound on its value.
#[derive(Clone, Debug)]
pub struct Peak {
    pub location: Real,
    pub upper: Real,
}

/// `f(a) + Σ_{i=1}^{M−1} f(x_i)` split into its two parts, with absolute
/// error bounds.
#[derive(Clone, Debug)]
pub(crate) struct GridSum {
    pub left: Real,
    pub left_err: f64,
    pub interior: Real,
    pub interior_err: f64,
}

fn check_grid(a: &Real, b: &Real, m: u64) -> Result<()> {
    if m < 2 {
        return Err(Error::domain(
            "riemann",
            format!("M must be at least 2, got {m}"),
        ));
    }
    if a.is_negative() || a >= b {
        return Err(Error::domain(
            "riemann",
            format!("interval must satisfy 0 ≤ a < b, got [{a:.10}, {b:.10}]"),
        ));
    }
    Ok(())
}

/// Evaluates the uniform-grid sum. `budget` turns each term's value and
/// relative error into its absolute error contribution.
pub(crate) fn grid_sum<F: Integrand + ?Sized>(
    f: &F,
    a: &Real,
    b: &Real,
    m: u64,
    cfg: &PrecisionConfig,
    cap: &Real,
) -> Result<GridSum> {
    let bits = cfg.bits();
    let a = a.with_bits(bits);
    let b = b.with_bits(bits);
    let policy = cfg.widening();
    let cap_f64 = cap.to_f64();
    let term_err = move |v: f64, rel: f64| match policy {
        WideningPolicy::PerOpUlp => rel * v.abs(),
        WideningPolicy::EndOfChain => rel * cap_f64,
    };

    let (left, left_rel) = f.eval(&a)?;
    let left_err = term_err(left.to_f64(), left_rel);

    if cfg.is_fast() && f.eval_f64(a.to_f64()).is_some() {
        let (sum, err) = fast_interior(f, a.to_f64(), b.to_f64(), m, &term_err)?;
        return Ok(GridSum {
            left,
            left_err,
            interior: Real::from_f64(sum, bits),
            interior_err: err,
        });
    }

    let len = &b - &a;
    let m_real = Real::from_u64(m, bits);
    let (acc, eval_err) = chunked_sum(1..m, bits, |i| {
        let x = &a + &(&(&len * &Real::from_u64(i, bits)) / &m_real);
        let (v, rel) = f.eval(&x)?;
        let e = term_err(v.to_f64(), rel);
        Ok((v, e))
    })?;
    Ok(GridSum {
        left,
        left_err,
        interior: acc.value(),
        interior_err: eval_err + acc.error_bound(),
    })
}

#[derive(Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
    abs_total: f64,
    count: u64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs_total += x.abs();
        self.count += 1;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }

    fn error_bound(&self) -> f64 {
        let u = unit_roundoff(53);
        (2.0 * u * self.value().abs() + 2.0 * (self.count as f64 + 2.0) * u * u * self.abs_total)
            * 1.01
    }
}

fn fast_interior<F: Integrand + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    m: u64,
    term_err: &(dyn Fn(f64, f64) -> f64 + Sync),
) -> Result<(f64, f64)> {
    let len = b - a;
    let mf = m as f64;
    let chunks = (m - 1).div_ceil(SUM_CHUNK);
    let partials: Vec<(Neumaier, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = 1 + c * SUM_CHUNK;
            let hi = (lo + SUM_CHUNK).min(m);
            let mut acc = Neumaier::default();
            let mut err = 0.0;
            for i in lo..hi {
                let x = a + (i as f64 * len) / mf;
                let (v, rel) = f.eval_f64(x).expect("fast path checked");
                acc.add(v);
                err += term_err(v, rel);
            }
            (acc, err + acc.error_bound())
        })
        .collect();
    let mut total = Neumaier::default();
    let mut err = 0.0;
    for (part, e) in partials {
        total.add(part.value());
        err += e;
    }
    let sum = total.value();
    if !sum.is_finite() || !err.is_finite() {
        return Err(Error::range("riemann", "non-finite grid sum"));
    }
    Ok((sum, err + total.error_bound()))
}

/// Step `(b − a)/M` rounded in `dir`.
pub(crate) fn step(a: &Real, b: &Real, m: u64, dir: Dir) -> Real {
    let len = b.sub_dir(a, dir);
    len.div_dir(&Real::from_u64(m, len.bits()), dir)
}

/// Certified enclosure of `∫_a^b f` for `f ≥ 0` unimodal on `[a, b]` with
/// maximum bounded by `peak.upper`:
/// `[(Σ_{i=0}^{M−1} f(x_i) − f*)·h, (Σ_{i=1}^{M−1} f(x_i) + f*)·h]`.
///
/// The peak may sit at either endpoint, which covers monotone integrands.
pub fn riemann_enclosure<F: Integrand + ?Sized>(
    f: &F,
    a: &Real,
    b: &Real,
    m: u64,
    peak: &Peak,
    cfg: &PrecisionConfig,
) -> Result<Enclosure> {
    check_grid(a, b, m)?;
    if peak.location < *a || peak.location > *b {
        return Err(Error::domain(
            "riemann",
            format!("peak {:.10} lies outside [{a:.10}, {b:.10}]", peak.location),
        ));
    }
    if peak.upper.is_negative() {
        return Err(Error::domain("riemann", "peak bound must be non-negative"));
    }
    let bits = cfg.bits();
    let peak_up = peak.upper.with_bits(bits.max(peak.upper.bits()));
    let sums = grid_sum(f, a, b, m, cfg, &peak_up)?;
    let budget = Real::from_f64(sums.interior_err + sums.left_err, bits);
    let interior_budget = Real::from_f64(sums.interior_err, bits);

    let lower_sum = sums
        .left
        .add_dir(&sums.interior, Dir::Down)
        .sub_dir(&budget, Dir::Down)
        .sub_dir(&peak_up, Dir::Down);
    let upper_sum = sums
        .interior
        .add_dir(&interior_budget, Dir::Up)
        .add_dir(&peak_up, Dir::Up);

    let h_lo = step(a, b, m, Dir::Down);
    let h_hi = step(a, b, m, Dir::Up);
    let lower = if lower_sum.is_negative() {
        lower_sum.mul_dir(&h_hi, Dir::Down)
    } else {
        lower_sum.mul_dir(&h_lo, Dir::Down)
    };
    let upper = upper_sum.mul_dir(&h_hi, Dir::Up);
    Enclosure::new(lower.with_bits(bits), upper.with_bits(bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(c: f64) -> impl Integrand {
        FnIntegrand(move |u: &Real| Ok((u.lit(c), 0.0)))
    }

    #[test]
    fn constant_function_is_contained() {
        for bits in [53, 192] {
            let cfg = PrecisionConfig::new(bits).unwrap();
            for m in [2u64, 7, 1000] {
                let f = constant(3.0);
                let peak = Peak {
                    location: Real::from_f64(0.5, bits),
                    upper: Real::from_f64(3.0, bits),
                };
                let e = riemann_enclosure(&f, &Real::zero(bits), &Real::one(bits), m, &peak, &cfg)
                    .unwrap();
                assert!(e.contains(&Real::from_f64(3.0, bits)));
                assert!(*e.hi() <= 3.0 + 1e-12);
                let expected_lo = 3.0 - 3.0 / m as f64;
                assert!((e.lo().to_f64() - expected_lo).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn parabola_contains_one_sixth() {
        for bits in [53, 192] {
            let cfg = PrecisionConfig::new(bits).unwrap();
            let eps = cfg.unit_roundoff();
            let f = FnIntegrand(move |u: &Real| {
                let v = u * &(&u.lit(1.0) - u);
                Ok((v, 20.0 * eps))
            });
            let peak = Peak {
                location: Real::from_f64(0.5, bits),
                upper: Real::from_f64(0.25, bits),
            };
            let e = riemann_enclosure(&f, &Real::zero(bits), &Real::one(bits), 100, &peak, &cfg)
                .unwrap();
            assert!(e.contains(&Real::ratio(1, 6, bits)));
            assert!((e.width().to_f64() - 0.005).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let cfg = PrecisionConfig::standard();
        let f = constant(1.0);
        let peak = Peak {
            location: Real::from_f64(0.5, 192),
            upper: Real::one(192),
        };
        let zero = Real::zero(192);
        let one = Real::one(192);
        assert!(riemann_enclosure(&f, &zero, &one, 1, &peak, &cfg).is_err());
        assert!(riemann_enclosure(&f, &one, &zero, 10, &peak, &cfg).is_err());
        let outside = Peak {
            location: Real::from_f64(1.5, 192),
            upper: Real::one(192),
        };
        assert!(riemann_enclosure(&f, &zero, &one, 10, &outside, &cfg).is_err());
    }

    #[test]
    fn end_of_chain_policy_is_no_tighter() {
        let per_op = PrecisionConfig::standard();
        let end = per_op.with_widening(WideningPolicy::EndOfChain);
        let f = FnIntegrand(|u: &Real| Ok((u * &(&u.lit(1.0) - u), 1e-40)));
        let peak = Peak {
            location: Real::from_f64(0.5, 192),
            upper: Real::from_f64(0.25, 192),
        };
        let (z, o) = (Real::zero(192), Real::one(192));
        let a = riemann_enclosure(&f, &z, &o, 64, &peak, &per_op).unwrap();
        let b = riemann_enclosure(&f, &z, &o, 64, &peak, &end).unwrap();
        assert!(b.contains_enclosure(&a));
    }
}
