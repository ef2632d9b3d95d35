//! The segment kernel `f_n(u) = u(1−u) e^{n+u} n! / (n+u)^{n+2}`, its
//! maximizer, and the partial error `Δ(x)` within one segment.

use crate::bounds::riemann::{riemann_enclosure, Integrand, Peak};
use crate::error::{Error, Result};
use crate::logint::{LogPoint, TruncationIndex};
use crate::numerics::{ln_factorial, Dir, Enclosure, PrecisionConfig, Real};

/// Extra bits used for the kernel's additive constant.
const CONSTANT_GUARD: u32 = 64;
/// Upper bound of `|φ''|` on `[1/3, 1/2]` for `φ = ln f_n`.
const CURVATURE_BOUND: f64 = 16.0;
/// Largest segment index accepted by [`KernelParams::new`].
pub const MAX_SEGMENT: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelParams {
    n: u64,
}

impl KernelParams {
    pub fn new(n: u64) -> Result<KernelParams> {
        if !(1..=MAX_SEGMENT).contains(&n) {
            return Err(Error::domain(
                "kernel",
                format!("segment index must be in 1..={MAX_SEGMENT}, got {n}"),
            ));
        }
        Ok(KernelParams { n })
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}

/// `f_n` with its constant `C_n = n + ln n! − (n+2) ln n` precomputed, so that
/// `ln f_n(u) = ln u + ln(1−u) + u + C_n − (n+2) ln(1 + u/n)`.
///
/// Every term is `O(1 + ln n)`, which keeps the evaluation stable for all `n`.
#[derive(Clone, Debug)]
pub struct Kernel {
    n: u64,
    cfg: PrecisionConfig,
    c: Real,
    c_f64: f64,
    n_real: Real,
    n_plus_2: Real,
}

impl Kernel {
    pub fn new(params: KernelParams, cfg: &PrecisionConfig) -> Result<Kernel> {
        let guard = cfg.guarded(CONSTANT_GUARD);
        let ln_fact = ln_factorial(params.n as i64, &guard)?;
        Kernel::with_ln_factorial(params, &ln_fact, cfg)
    }

    /// Builds the kernel from a precomputed `ln n!`, which should carry at
    /// least 64 bits more than `cfg`.
    pub fn with_ln_factorial(
        params: KernelParams,
        ln_fact: &Real,
        cfg: &PrecisionConfig,
    ) -> Result<Kernel> {
        let g = ln_fact.bits().max(cfg.bits() + CONSTANT_GUARD);
        let n = Real::from_u64(params.n, g);
        let c = &(&n + &ln_fact.with_bits(g)) - &(&Real::from_u64(params.n + 2, g) * &n.ln());
        let c = c.finite("kernel")?.with_bits(cfg.bits());
        Ok(Kernel {
            n: params.n,
            cfg: *cfg,
            c_f64: c.to_f64(),
            c,
            n_real: Real::from_u64(params.n, cfg.bits()),
            n_plus_2: Real::from_u64(params.n + 2, cfg.bits()),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn config(&self) -> &PrecisionConfig {
        &self.cfg
    }

    fn relative_error(&self, u: f64, magnitude: f64) -> f64 {
        let eps = self.cfg.unit_roundoff();
        let sensitivity = if u < 1.0 {
            u / (1.0 - u)
        } else {
            f64::INFINITY
        };
        let exponent_err = eps * (6.0 * magnitude + 4.0 * sensitivity + 16.0);
        1.1 * exponent_err + eps
    }

    /// `f_n(u)` and a bound on its relative error. The bound also covers a
    /// relative perturbation of `u` by up to four units of roundoff.
    pub fn value(&self, u: &Real) -> Result<(Real, f64)> {
        if u.is_zero() || *u == 1.0 {
            return Ok((Real::zero(self.cfg.bits()), 0.0));
        }
        if self.cfg.is_fast() {
            let (v, e) = self.value_f64(u.to_f64());
            return Ok((Real::from_f64(v, self.cfg.bits()), e));
        }
        let u = u.with_bits(self.cfg.bits());
        let a = u.ln();
        let b = (-&u).ln_1p();
        let d = &self.n_plus_2 * &(&u / &self.n_real).ln_1p();
        let s = &(&(&a + &b) + &u) + &(&self.c - &d);
        let magnitude =
            a.to_f64().abs() + b.to_f64().abs() + u.to_f64() + self.c_f64.abs() + d.to_f64().abs();
        let v = s.exp().finite("kernel")?;
        Ok((v, self.relative_error(u.to_f64(), magnitude)))
    }

    /// Native-double evaluation used by 53-bit sweeps.
    pub fn value_f64(&self, u: f64) -> (f64, f64) {
        if u <= 0.0 || u >= 1.0 {
            return (0.0, 0.0);
        }
        let a = u.ln();
        let b = (-u).ln_1p();
        let d = (self.n as f64 + 2.0) * (u / self.n as f64).ln_1p();
        let s = a + b + u + (self.c_f64 - d);
        let magnitude = a.abs() + b.abs() + u + self.c_f64.abs() + d.abs();
        (s.exp(), self.relative_error(u, magnitude))
    }

    /// Cubic whose unique root in `(0, 1)` is the maximizer:
    /// `u³ − u² + (1+2n)u − n`.
    pub fn cubic(&self, u: &Real) -> Real {
        let bits = u.bits();
        let n = Real::from_u64(self.n, bits);
        let lin = Real::from_u64(2 * self.n + 1, bits);
        &(&(&(&u.square() * u) - &u.square()) + &(&lin * u)) - &n
    }

    /// Locates the maximizer by bisection on the cubic until the bracket is
    /// narrower than `tol`.
    pub fn maximizer(&self, tol: &Real) -> Result<MaximizerResult> {
        let bits = self.cfg.bits();
        let floor = Real::from_f64(2f64.powi(4 - bits as i32), bits);
        if tol.is_negative() || *tol < floor {
            return Err(Error::domain(
                "maximizer",
                format!("tolerance must be at least 2^(4-p) = {floor:.6}, got {tol:.6}"),
            ));
        }
        let two = Real::from_f64(2.0, bits);
        let mut lo = Real::zero(bits);
        let mut hi = Real::one(bits);
        while &hi - &lo > *tol {
            let mid = &(&lo + &hi) / &two;
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cubic(&mid).is_negative() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let u_star = &(&lo + &hi) / &two;
        let third = Real::ratio(1, 3, bits);
        if u_star < third || u_star > 0.5 {
            return Err(Error::range(
                "maximizer",
                format!("root {u_star:.10} left [1/3, 1/2]"),
            ));
        }
        let residual = self.cubic(&u_star);

        // The cubic's derivative is at least 2n + 2/3 on [0, 1].
        let guard = bits + CONSTANT_GUARD;
        let exact_residual = self.cubic(&u_star.with_bits(guard)).abs().to_f64();
        let location_error =
            exact_residual * (1.0 + 1e-12) / (2.0 * self.n as f64) + 2f64.powi(-(bits as i32) - 60);

        let (f_at_ustar, rel) = self.value(&u_star)?;
        let factor = 2.0 * (rel + 0.5 * CURVATURE_BOUND * location_error * location_error);
        let growth = f_at_ustar.mul_dir(&f_at_ustar.lit(factor), Dir::Up);
        let peak_upper = f_at_ustar.add_dir(&growth, Dir::Up);
        Ok(MaximizerResult {
            n: self.n,
            u_star,
            f_at_ustar,
            residual,
            bracket: (lo, hi),
            location_error,
            peak_upper,
        })
    }
}

impl Integrand for Kernel {
    fn eval(&self, u: &Real) -> Result<(Real, f64)> {
        self.value(u)
    }

    fn eval_f64(&self, u: f64) -> Option<(f64, f64)> {
        self.cfg.is_fast().then(|| self.value_f64(u))
    }
}

/// `f_n(u)` for `u ∈ [0, 1]`.
pub fn kernel_f(params: KernelParams, u: &Real, cfg: &PrecisionConfig) -> Result<Real> {
    if u.is_negative() || *u > 1.0 {
        return Err(Error::domain(
            "kernel_f",
            format!("u must lie in [0, 1], got {u:.20}"),
        ));
    }
    Kernel::new(params, cfg)?.value(u).map(|(v, _)| v)
}

/// Default bisection tolerance `2^(−p/2)`.
pub fn default_tolerance(cfg: &PrecisionConfig) -> Real {
    Real::from_f64(2f64.powi(-(cfg.bits() as i32) / 2), cfg.bits())
}

#[derive(Clone, Debug)]
pub struct MaximizerResult {
    pub n: u64,
    pub u_star: Real,
    /// Computed kernel value at `u_star`.
    pub f_at_ustar: Real,
    /// Cubic evaluated at `u_star`.
    pub residual: Real,
    /// Final bisection bracket.
    pub bracket: (Real, Real),
    /// Certified bound on the distance from `u_star` to the exact root.
    pub location_error: f64,
    /// Certified upper bound on `max f_n`.
    pub peak_upper: Real,
}

impl MaximizerResult {
    pub fn peak(&self) -> Peak {
        Peak {
            location: self.u_star.clone(),
            upper: self.peak_upper.clone(),
        }
    }
}

/// Maximizer of `f_n` with tolerance `tol`.
pub fn maximizer(
    params: KernelParams,
    tol: &Real,
    cfg: &PrecisionConfig,
) -> Result<MaximizerResult> {
    Kernel::new(params, cfg)?.maximizer(tol)
}

/// Certified enclosure of `Δ(x) = ∫₀^{ln x − n} f_n(u) du` with
/// `n = ⌈ln x⌉ − 1`, using `m` subintervals.
pub fn delta_x(point: &LogPoint, m: u64, cfg: &PrecisionConfig) -> Result<Enclosure> {
    let ln_x = point.ln_x_at_least_e("delta_x", cfg.bits())?;
    if ln_x <= 1.0 {
        return Err(Error::domain("delta_x", "x must exceed e"));
    }
    let idx = TruncationIndex::from_ln(&ln_x)?;
    let top = &ln_x - &Real::from_u64(idx.n_x, cfg.bits());
    let kernel = Kernel::new(KernelParams::new(idx.n_x)?, cfg)?;
    let peak = kernel.maximizer(&default_tolerance(cfg))?;
    let below_peak = top.to_f64() + peak.location_error < peak.bracket.0.to_f64();
    let peak = if below_peak {
        // f_n is increasing on [0, top], so the maximum sits at the endpoint.
        let (value, rel) = kernel.value(&top)?;
        let upper = value.add_dir(&value.mul_dir(&value.lit(2.0 * rel), Dir::Up), Dir::Up);
        Peak {
            location: top.clone(),
            upper,
        }
    } else {
        let location = if peak.u_star > top {
            top.clone()
        } else {
            peak.u_star.clone()
        };
        Peak {
            location,
            upper: peak.peak_upper,
        }
    };
    riemann_enclosure(&kernel, &Real::zero(cfg.bits()), &top, m, &peak, cfg)
}
