//! Independent oracles: tanh-sinh quadrature, Ramanujan's series for `li`,
//! and the kernel evaluated directly from an exact factorial.

#![allow(dead_code)]

use rug::Integer;
use sterr::bounds::{sweep, DeltaCache, DeltaSeries};
use sterr::{PrecisionConfig, Real};

fn cosh(t: &Real) -> Real {
    let e = t.exp();
    &(&e + &e.recip()) / &t.lit(2.0)
}

fn sinh(t: &Real) -> Real {
    let e = t.exp();
    &(&e - &e.recip()) / &t.lit(2.0)
}

/// `∫_a^b f` by tanh-sinh quadrature at `bits`, halving the step until two
/// levels agree to `2^(−bits+16)` relative.
pub fn tanh_sinh(f: impl Fn(&Real) -> Real, a: &Real, b: &Real, bits: u32) -> Real {
    let half_pi = &Real::pi(bits) / &Real::from_f64(2.0, bits);
    let center = &(a + b) / &a.lit(2.0).with_bits(bits);
    let radius = &(b - a) / &a.lit(2.0).with_bits(bits);
    let tol = Real::from_f64(2f64.powi(16 - bits as i32), bits);
    let node = |t: &Real| -> Option<Real> {
        let s = &half_pi * &sinh(t);
        let c = cosh(&s);
        let x_off = &radius * &(&sinh(&s) / &c);
        let w = &(&half_pi * &cosh(t)) / &(&c * &c);
        let x = &center + &x_off;
        if x <= *a || x >= *b || w.is_zero() {
            return None;
        }
        Some(&f(&x) * &w)
    };
    let t_max = 6.5;
    let mut h = 0.5f64;
    let mut prev: Option<Real> = None;
    for _ in 0..12 {
        let hr = Real::from_f64(h, bits);
        let mut sum = Real::zero(bits);
        let steps = (t_max / h).ceil() as i64;
        for j in -steps..=steps {
            let t = &hr * &Real::from_i64(j, bits);
            if let Some(v) = node(&t) {
                sum = &sum + &v;
            }
        }
        let value = &(&sum * &hr) * &radius;
        if let Some(p) = &prev {
            if (&value - p).abs() <= &value.abs() * &tol {
                return value;
            }
        }
        prev = Some(value);
        h /= 2.0;
    }
    prev.expect("at least one level")
}

pub fn euler_gamma(bits: u32) -> Real {
    Real::parse(sterr::constants::EULER_GAMMA, bits).unwrap()
}

/// Ramanujan's series
/// `li(x) = γ + ln|ln x| + √x Σ_{n≥1} (−1)^{n−1} (ln x)^n / (n! 2^{n−1}) Σ_{j<⌈n/2⌉} 1/(2j+1)`.
pub fn li_ramanujan(ln_x: &Real, bits: u32) -> Real {
    let w = bits + 64;
    let y = ln_x.with_bits(w);
    let sqrt_x = (&y / &y.lit(2.0)).exp();
    let mut inner = Real::zero(w);
    // term_n = y^n / (n! 2^{n−1}), starting from term_0 = 2.
    let mut term = Real::from_u64(2, w);
    let mut sum = Real::zero(w);
    let mut small = 0;
    for n in 1..100_000u64 {
        term = &(&term * &y) / &Real::from_u64(2 * n, w);
        if n % 2 == 1 {
            inner = &inner + &Real::from_u64(n, w).recip();
        }
        let signed = if n % 2 == 1 { term.clone() } else { -&term };
        let contrib = &signed * &inner;
        sum = &sum + &contrib;
        if contrib.abs() < sum.abs() * Real::from_f64(2f64.powi(-(w as i32)), w)
            && n as f64 > y.abs().to_f64()
        {
            small += 1;
            if small == 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    let value = &(&euler_gamma(w) + &y.abs().ln()) + &(&sqrt_x * &sum);
    value.with_bits(bits)
}

/// `li(x) = Ei(ln x) = γ + ln|y| + ∫₀^y (e^t − 1)/t dt` with `y = ln x`.
pub fn li_quadrature(ln_x: &Real, bits: u32) -> Real {
    let w = bits + 64;
    let y = ln_x.with_bits(w);
    let f = |t: &Real| &(&t.exp() - &t.lit(1.0)) / t;
    let zero = Real::zero(w);
    let integral = if y.is_negative() {
        -tanh_sinh(f, &y, &zero, w)
    } else {
        tanh_sinh(f, &zero, &y, w)
    };
    (&(&euler_gamma(w) + &y.abs().ln()) + &integral).with_bits(bits)
}

pub fn exact_factorial(n: u64, bits: u32) -> Real {
    let f = Integer::from(Integer::factorial(n as u32));
    Real::parse(&f.to_string(), bits).unwrap()
}

/// `u(1−u)e^{n+u} n! / (n+u)^{n+2}` straight from the definition.
pub fn kernel_direct(n: u64, u: &Real, bits: u32) -> Real {
    let u = u.with_bits(bits);
    let nu = &Real::from_u64(n, bits) + &u;
    let num = &(&(&u * &(&u.lit(1.0) - &u)) * &nu.exp()) * &exact_factorial(n, bits);
    &num / &nu.powi(n as i32 + 2)
}

/// `∫₀¹ f_n` by quadrature.
pub fn kernel_integral(n: u64, bits: u32) -> Real {
    tanh_sinh(
        |u| kernel_direct(n, u, bits),
        &Real::zero(bits),
        &Real::one(bits),
        bits,
    )
}

pub fn series(k_max: u64, m: u64, cfg: &PrecisionConfig) -> DeltaSeries {
    let ks: Vec<u64> = (2..=k_max).collect();
    DeltaSeries::new(sweep(&ks, m, cfg).unwrap(), k_max).unwrap()
}

pub fn cache_with(ks: &[u64], m: u64, cfg: &PrecisionConfig) -> DeltaCache {
    let mut cache = DeltaCache::new();
    cache.fill(ks, m, cfg).unwrap();
    cache
}
