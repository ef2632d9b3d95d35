//! Enclosures of the partial errors `Δ_k = ∫₀¹ f_{k−1}(u) du`.

use rayon::prelude::*;

use super::riemann::{grid_sum, riemann_enclosure, step, Integrand};
use super::{certify, guard_bits};
use crate::error::{Error, Result};
use crate::kernel::{default_tolerance, Kernel, KernelParams};
use crate::numerics::{Dir, Enclosure, LnFactorialTable, PrecisionConfig, Real};

/// Certified Riemann bounds for one `Δ_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaRecord {
    pub k: u64,
    pub m: u64,
    pub precision_bits: u32,
    pub s_lower: Real,
    pub s_upper: Real,
    pub u_star: Real,
    pub f_at_ustar: Real,
}

impl DeltaRecord {
    pub fn enclosure(&self) -> Result<Enclosure> {
        Enclosure::new(self.s_lower.clone(), self.s_upper.clone())
    }

    /// `S_upper − S_lower`: the local error `δ_k` including rounding.
    pub fn width(&self) -> Real {
        self.s_upper.sub_dir(&self.s_lower, Dir::Up)
    }

    /// `2·f(u*)/M`, the local error without rounding widening.
    pub fn local_error(&self) -> Real {
        let two_f = &self.f_at_ustar * &self.f_at_ustar.lit(2.0);
        &two_f / &Real::from_u64(self.m, self.f_at_ustar.bits())
    }
}

fn check_k(op: &'static str, k: u64) -> Result<()> {
    if k < 2 {
        return Err(Error::domain(op, format!("k must be at least 2, got {k}")));
    }
    Ok(())
}

fn record_for(kernel: &Kernel, k: u64, m: u64, cfg: &PrecisionConfig) -> Result<DeltaRecord> {
    let peak = kernel.maximizer(&default_tolerance(cfg))?;
    let bits = cfg.bits();
    let enc = riemann_enclosure(
        kernel,
        &Real::zero(bits),
        &Real::one(bits),
        m,
        &peak.peak(),
        cfg,
    )?;
    Ok(DeltaRecord {
        k,
        m,
        precision_bits: bits,
        s_lower: enc.lo().clone(),
        s_upper: enc.hi().clone(),
        u_star: peak.u_star,
        f_at_ustar: peak.f_at_ustar,
    })
}

/// Riemann enclosure of `Δ_k` with `M` subintervals.
pub fn delta_k_riemann(k: u64, m: u64, cfg: &PrecisionConfig) -> Result<DeltaRecord> {
    check_k("delta_k_riemann", k)?;
    let kernel = Kernel::new(KernelParams::new(k - 1)?, cfg)?;
    record_for(&kernel, k, m, cfg)
}

/// [`delta_k_riemann`] for every `k` in `ks`, in parallel across `k`.
pub fn sweep(ks: &[u64], m: u64, cfg: &PrecisionConfig) -> Result<Vec<DeltaRecord>> {
    for &k in ks {
        check_k("sweep", k)?;
    }
    let Some(&k_max) = ks.iter().max() else {
        return Ok(Vec::new());
    };
    let table = LnFactorialTable::new(k_max - 1, &cfg.guarded(64))?;
    ks.par_iter()
        .map(|&k| {
            let ln_fact = table.get(k - 1).expect("table covers k - 1");
            let kernel = Kernel::with_ln_factorial(KernelParams::new(k - 1)?, ln_fact, cfg)?;
            record_for(&kernel, k, m, cfg)
        })
        .collect()
}

/// `[√(2π)e^{1/(12m+1) − 1/(8m)} / (6k^{3/2}), √(2π)e^{1/(12m)} / (6m^{3/2})]`
/// with `m = k − 1`.
pub fn delta_k_simple(k: u64, cfg: &PrecisionConfig) -> Result<Enclosure> {
    check_k("delta_k_simple", k)?;
    let g = guard_bits(cfg);
    let m = k - 1;
    let sqrt_2pi = (&Real::pi(g) * &Real::from_f64(2.0, g)).sqrt();
    let kr = Real::from_u64(k, g);
    let mr = Real::from_u64(m, g);
    let six = Real::from_f64(6.0, g);
    let lo_exp = &(Real::one(g) / Real::from_u64(12 * m + 1, g))
        - &(Real::one(g) / Real::from_u64(8 * m, g));
    let lo = &(&sqrt_2pi * &lo_exp.exp()) / &(&six * &(&kr * &kr.sqrt()));
    let hi_exp = Real::one(g) / Real::from_u64(12 * m, g);
    let hi = &(&sqrt_2pi * &hi_exp.exp()) / &(&six * &(&mr * &mr.sqrt()));
    let lo = certify(&lo, 16.0 * lo.to_f64(), cfg)?;
    let hi = certify(&hi, 16.0 * hi.to_f64(), cfg)?;
    Enclosure::new(lo.lo().clone(), hi.hi().clone())
}

/// Integrand `e^{(u−½)²/(4m)} u(1−u) / (m+u)^{3/2}` of `F(m)`.
struct FIntegrand {
    m: Real,
    cfg: PrecisionConfig,
}

impl FIntegrand {
    fn relative_error(&self, u: f64) -> f64 {
        let eps = self.cfg.unit_roundoff();
        let sensitivity = if u < 1.0 {
            u / (1.0 - u)
        } else {
            f64::INFINITY
        };
        1.1 * eps * (28.0 + 4.0 * sensitivity)
    }
}

impl Integrand for FIntegrand {
    fn eval(&self, u: &Real) -> Result<(Real, f64)> {
        if u.is_zero() || *u == 1.0 {
            return Ok((Real::zero(self.cfg.bits()), 0.0));
        }
        let u = u.with_bits(self.cfg.bits());
        let c = &u - &u.lit(0.5);
        let t = &c.square() / &(&self.m * &u.lit(4.0));
        let shifted = &self.m + &u;
        let denom = &shifted * &shifted.sqrt();
        let v = &(&t.exp() * &(&u * &(&u.lit(1.0) - &u))) / &denom;
        Ok((v, self.relative_error(u.to_f64())))
    }

    fn eval_f64(&self, u: f64) -> Option<(f64, f64)> {
        if !self.cfg.is_fast() {
            return None;
        }
        if u <= 0.0 || u >= 1.0 {
            return Some((0.0, 0.0));
        }
        let m = self.m.to_f64();
        let t = (u - 0.5) * (u - 0.5) / (4.0 * m);
        let s = m + u;
        Some((
            t.exp() * (u * (1.0 - u)) / (s * s.sqrt()),
            self.relative_error(u),
        ))
    }
}

/// Enclosure of `F(m) = ∫₀¹ e^{(u−½)²/(4m)} u(1−u) / (m+u)^{3/2} du` by the
/// trapezoid rule with `M` panels.
///
/// The integrand vanishes at both ends and its derivative is bounded by
/// `L = 1.6·m^{−3/2}`, so the trapezoid error is at most `L·h/4`.
pub fn f_integral(m: u64, panels: u64, cfg: &PrecisionConfig) -> Result<Enclosure> {
    if m < 1 {
        return Err(Error::domain("f_integral", "m must be at least 1"));
    }
    if panels < 2 {
        return Err(Error::domain(
            "f_integral",
            format!("M must be at least 2, got {panels}"),
        ));
    }
    let bits = cfg.bits();
    let f = FIntegrand {
        m: Real::from_u64(m, bits),
        cfg: *cfg,
    };
    let zero = Real::zero(bits);
    let one = Real::one(bits);
    let cap = Real::from_f64(1.1 * (m as f64).powf(-1.5) / 4.0, bits);
    let sums = grid_sum(&f, &zero, &one, panels, cfg, &cap)?;
    let lipschitz = 1.6 * (m as f64).powf(-1.5);
    let h_hi = step(&zero, &one, panels, Dir::Up);
    let h_lo = step(&zero, &one, panels, Dir::Down);
    let quad = Real::from_f64(lipschitz / 4.0 * 1.0001, bits).mul_dir(&h_hi, Dir::Up);
    let budget = Real::from_f64(sums.interior_err, bits);
    let lo = sums
        .interior
        .sub_dir(&budget, Dir::Down)
        .mul_dir(&h_lo, Dir::Down)
        .sub_dir(&quad, Dir::Down);
    let hi = sums
        .interior
        .add_dir(&budget, Dir::Up)
        .mul_dir(&h_hi, Dir::Up)
        .add_dir(&quad, Dir::Up);
    Enclosure::new(lo, hi)
}

/// `[√(2π)e^{1/(12m+1) − 1/(8m)}·F(m), √(2π)e^{1/(48m)}·F(m)]` with
/// `m = k − 1`, and `F(m)` enclosed with `panels` trapezoid panels.
pub fn delta_k_general(k: u64, panels: u64, cfg: &PrecisionConfig) -> Result<Enclosure> {
    check_k("delta_k_general", k)?;
    let m = k - 1;
    let f = f_integral(m, panels, cfg)?;
    let g = guard_bits(cfg);
    let sqrt_2pi = (&Real::pi(g) * &Real::from_f64(2.0, g)).sqrt();
    let lo_exp = &(Real::one(g) / Real::from_u64(12 * m + 1, g))
        - &(Real::one(g) / Real::from_u64(8 * m, g));
    let hi_exp = Real::one(g) / Real::from_u64(48 * m, g);
    let c_lo = &sqrt_2pi * &lo_exp.exp();
    let c_hi = &sqrt_2pi * &hi_exp.exp();
    let c_lo = certify(&c_lo, 16.0 * c_lo.to_f64(), cfg)?;
    let c_hi = certify(&c_hi, 16.0 * c_hi.to_f64(), cfg)?;
    let f_lo = f.lo().max(&Real::zero(cfg.bits()));
    Enclosure::new(
        c_lo.lo().mul_dir(&f_lo, Dir::Down),
        c_hi.hi().mul_dir(f.hi(), Dir::Up),
    )
}
