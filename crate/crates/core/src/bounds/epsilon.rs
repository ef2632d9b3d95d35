//! Enclosures of `ε_n` and `ε(x)`: the telescoped Riemann bounds, the
//! closed-form bounds parametrized by `(κ, τ)`, and the explicit envelope.

use serde::Serialize;

use super::delta::DeltaRecord;
use super::{certify, guard_bits};
use crate::constants::{
    ENVELOPE_LOWER_OFFSET, ENVELOPE_UPPER_OFFSET, EPSILON_ONE, EPSILON_ONE_RADIUS,
};
use crate::error::{Error, Result};
use crate::logint::{LogPoint, TruncationIndex};
use crate::numerics::{widen_outward, Dir, Enclosure, PrecisionConfig, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsilonMethod {
    RiemannTelescope,
    SimpleS,
    ExplicitEnvelope,
}

#[derive(Clone, Debug)]
pub struct EpsilonBound {
    pub n: u64,
    pub lo: Real,
    pub hi: Real,
    pub method: EpsilonMethod,
    /// `Σ δ_k` over the constituent records; zero for closed forms.
    pub accumulated_delta: Real,
}

impl EpsilonBound {
    pub fn enclosure(&self) -> Result<Enclosure> {
        Enclosure::new(self.lo.clone(), self.hi.clone())
    }
}

/// `ε₁` as stored, widened by its truncation radius.
pub fn epsilon_one_anchor(bits: u32) -> Enclosure {
    let value = Real::parse(EPSILON_ONE, bits.max(128)).expect("constant literal parses");
    let radius = Real::parse(EPSILON_ONE_RADIUS, bits.max(128)).expect("constant literal parses");
    widen_outward(&value, &radius)
        .expect("radius is positive")
        .with_bits(bits)
}

/// Contiguous `Δ_k` records for `k = 2..=k_max` sharing one `M` and precision.
#[derive(Clone, Debug)]
pub struct DeltaSeries {
    m: u64,
    bits: u32,
    records: Vec<DeltaRecord>,
}

impl DeltaSeries {
    /// Accepts records in any order; reports the first missing `k`.
    pub fn new(mut records: Vec<DeltaRecord>, k_max: u64) -> Result<DeltaSeries> {
        records.sort_by_key(|r| r.k);
        records.dedup_by_key(|r| r.k);
        let (m, bits) = match records.first() {
            Some(r) => (r.m, r.precision_bits),
            None if k_max <= 1 => (0, crate::numerics::FAST_BITS),
            None => return Err(Error::Dependency("no delta record for k = 2".into())),
        };
        records.retain(|r| r.k <= k_max);
        for (i, r) in records.iter().enumerate() {
            let expected = i as u64 + 2;
            if r.k != expected {
                return Err(Error::Dependency(format!(
                    "no delta record for k = {expected} (M = {m}, {bits} bits)"
                )));
            }
            if r.m != m || r.precision_bits != bits {
                return Err(Error::Dependency(format!(
                    "record k = {} has M = {}, {} bits; series uses M = {m}, {bits} bits",
                    r.k, r.m, r.precision_bits
                )));
            }
        }
        let have = records.len() as u64 + 1;
        if k_max > 1 && have < k_max {
            return Err(Error::Dependency(format!(
                "no delta record for k = {} (M = {m}, {bits} bits)",
                have + 1
            )));
        }
        Ok(DeltaSeries { m, bits, records })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn k_max(&self) -> u64 {
        self.records.len() as u64 + 1
    }

    pub fn get(&self, k: u64) -> Option<&DeltaRecord> {
        k.checked_sub(2).and_then(|i| self.records.get(i as usize))
    }

    pub fn records(&self) -> &[DeltaRecord] {
        &self.records
    }
}

/// Telescoped bounds `[ε₁ − Σ S_upper, ε₁ − Σ S_lower]` for every
/// `n = 1..=k_max`, returned in order of `n`.
pub fn epsilon_riemann_series(series: &DeltaSeries) -> Vec<EpsilonBound> {
    let bits = series.bits();
    let anchor = epsilon_one_anchor(bits);
    let mut sum_upper = Real::zero(bits);
    let mut sum_lower = Real::zero(bits);
    let mut acc_delta = Real::zero(bits);
    let mut out = Vec::with_capacity(series.k_max() as usize);
    out.push(EpsilonBound {
        n: 1,
        lo: anchor.lo().clone(),
        hi: anchor.hi().clone(),
        method: EpsilonMethod::RiemannTelescope,
        accumulated_delta: acc_delta.clone(),
    });
    for r in series.records() {
        sum_upper = sum_upper.add_dir(&r.s_upper, Dir::Up);
        sum_lower = sum_lower.add_dir(&r.s_lower, Dir::Down);
        acc_delta = acc_delta.add_dir(&r.width(), Dir::Up);
        out.push(EpsilonBound {
            n: r.k,
            lo: anchor.lo().sub_dir(&sum_upper, Dir::Down),
            hi: anchor.hi().sub_dir(&sum_lower, Dir::Up),
            method: EpsilonMethod::RiemannTelescope,
            accumulated_delta: acc_delta.clone(),
        });
    }
    out
}

/// Telescoped bound on `ε_n`; needs records for `k = 2..=n`.
pub fn epsilon_n_riemann(n: u64, series: &DeltaSeries) -> Result<EpsilonBound> {
    if n < 1 {
        return Err(Error::domain("epsilon_n_riemann", "n must be at least 1"));
    }
    if n > series.k_max() {
        return Err(Error::Dependency(format!(
            "no delta record for k = {} (series ends at {})",
            series.k_max() + 1,
            series.k_max()
        )));
    }
    let truncated = DeltaSeries {
        m: series.m,
        bits: series.bits,
        records: series.records[..(n as usize - 1)].to_vec(),
    };
    Ok(epsilon_riemann_series(&truncated)
        .pop()
        .expect("series contains n = 1"))
}

/// Constants of the closed-form bounds anchored at index `s`.
#[derive(Clone, Debug, Serialize)]
pub struct KappaTau {
    pub s: u64,
    /// `e^{1/(12s)}`.
    #[serde(serialize_with = "ser_real")]
    pub kappa_lo: Real,
    /// `e^{1/(12s+1) − 1/(8s)}`.
    #[serde(serialize_with = "ser_real")]
    pub kappa_hi: Real,
    #[serde(serialize_with = "ser_real")]
    pub tau_lo: Real,
    #[serde(serialize_with = "ser_real")]
    pub tau_hi: Real,
}

fn ser_real<S: serde::Serializer>(r: &Real, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_exact_string())
}

/// `(κ/3)·√(2π/n)` enclosed.
fn scaled_root(kappa: &Enclosure, n: u64, cfg: &PrecisionConfig) -> Result<Enclosure> {
    let g = guard_bits(cfg);
    let root = (&(&Real::pi(g) * &Real::from_f64(2.0, g)) / &Real::from_u64(n, g)).sqrt();
    let third = &root / &Real::from_f64(3.0, g);
    let c = certify(&third, 4.0 * third.to_f64(), cfg)?;
    Enclosure::new(
        c.lo().mul_dir(kappa.lo(), Dir::Down),
        c.hi().mul_dir(kappa.hi(), Dir::Up),
    )
}

fn kappa_pair(s: u64, cfg: &PrecisionConfig) -> Result<(Enclosure, Enclosure)> {
    let g = guard_bits(cfg);
    let lo = (Real::one(g) / Real::from_u64(12 * s, g)).exp();
    let hi_exp = &(Real::one(g) / Real::from_u64(12 * s + 1, g))
        - &(Real::one(g) / Real::from_u64(8 * s, g));
    let hi = hi_exp.exp();
    Ok((
        certify(&lo, 4.0 * lo.to_f64(), cfg)?,
        certify(&hi, 4.0 * hi.to_f64(), cfg)?,
    ))
}

/// `κ` and `τ` for index `s` given a certified bound on `ε_s`:
/// `τ_lo = ε_s.lo − (κ_lo/3)√(2π/s)`, `τ_hi = ε_s.hi − (κ_hi/3)√(2π/s)`.
pub fn kappa_tau(s: u64, eps_s: &EpsilonBound, cfg: &PrecisionConfig) -> Result<KappaTau> {
    if s < 1 {
        return Err(Error::domain("kappa_tau", "s must be at least 1"));
    }
    if eps_s.n != s {
        return Err(Error::domain(
            "kappa_tau",
            format!("bound is for n = {}, expected s = {s}", eps_s.n),
        ));
    }
    let (k_lo, k_hi) = kappa_pair(s, cfg)?;
    let lo_term = scaled_root(&k_lo, s, cfg)?;
    let hi_term = scaled_root(&k_hi, s, cfg)?;
    Ok(KappaTau {
        s,
        kappa_lo: k_lo.midpoint(),
        kappa_hi: k_hi.midpoint(),
        tau_lo: eps_s
            .lo
            .with_bits(cfg.bits())
            .sub_dir(lo_term.hi(), Dir::Down),
        tau_hi: eps_s
            .hi
            .with_bits(cfg.bits())
            .sub_dir(hi_term.lo(), Dir::Up),
    })
}

/// `[τ_lo + (κ_lo/3)√(2π/n), τ_hi + (κ_hi/3)√(2π/n)]` for `n > s`.
pub fn epsilon_n_simple(n: u64, kt: &KappaTau, cfg: &PrecisionConfig) -> Result<EpsilonBound> {
    if n <= kt.s {
        return Err(Error::domain(
            "epsilon_n_simple",
            format!("n must exceed s = {}, got {n}", kt.s),
        ));
    }
    let (k_lo, k_hi) = kappa_pair(kt.s, cfg)?;
    let lo_term = scaled_root(&k_lo, n, cfg)?;
    let hi_term = scaled_root(&k_hi, n, cfg)?;
    let bits = cfg.bits();
    Ok(EpsilonBound {
        n,
        lo: kt.tau_lo.with_bits(bits).add_dir(lo_term.lo(), Dir::Down),
        hi: kt.tau_hi.with_bits(bits).add_dir(hi_term.hi(), Dir::Up),
        method: EpsilonMethod::SimpleS,
        accumulated_delta: Real::zero(bits),
    })
}

/// Explicit envelope on `ε(x)` for `⌊ln x⌋ = floor`:
/// `[√(2π)/(3√(floor+1)) − C_l, √(2π)/(3√floor) + C_r]`.
pub fn explicit_envelope(floor: u64, cfg: &PrecisionConfig) -> Result<EpsilonBound> {
    if floor < 1 {
        return Err(Error::domain(
            "explicit_envelope",
            "⌊ln x⌋ must be at least 1",
        ));
    }
    let one = Enclosure::point(Real::one(cfg.bits()))?;
    let lo_root = scaled_root(&one, floor + 1, cfg)?;
    let hi_root = scaled_root(&one, floor, cfg)?;
    let bits = cfg.bits();
    let c_l = Real::parse(ENVELOPE_LOWER_OFFSET, bits)?;
    let c_r = Real::parse(ENVELOPE_UPPER_OFFSET, bits)?;
    Ok(EpsilonBound {
        n: floor,
        lo: lo_root.lo().sub_dir(&c_l, Dir::Down),
        hi: hi_root.hi().add_dir(&c_r, Dir::Up),
        method: EpsilonMethod::ExplicitEnvelope,
        accumulated_delta: Real::zero(bits),
    })
}

/// Enclosure of `ε(x)` from `ε_{⌊ln x⌋+1} < ε(x) ≤ ε_{⌊ln x⌋}`, using the
/// telescoped `bounds` (indexed from `n = 1`) while they reach, and the
/// explicit envelope beyond.
pub fn epsilon_x_bounds(
    point: &LogPoint,
    bounds: &[EpsilonBound],
    cfg: &PrecisionConfig,
) -> Result<Enclosure> {
    let ln_x = point.ln_x_at_least_e("epsilon_x_bounds", cfg.bits())?;
    let idx = TruncationIndex::from_ln(&ln_x)?;
    let reach = bounds.len() as u64;
    let get = |n: u64| &bounds[n as usize - 1];
    if idx.alpha.is_zero() && idx.n_star <= reach {
        return get(idx.n_star).enclosure();
    }
    if idx.n_star < reach {
        return Enclosure::new(get(idx.n_star + 1).lo.clone(), get(idx.n_star).hi.clone());
    }
    explicit_envelope(idx.n_star, cfg)?.enclosure()
}

/// `|1/√⌊ln x⌋ − 1/√ln x|`.
pub fn floor_root_gap(point: &LogPoint, cfg: &PrecisionConfig) -> Result<Real> {
    let g = guard_bits(cfg);
    let ln_x = point.ln_x_at_least_e("floor_root_gap", g)?;
    let floor = ln_x.floor();
    let gap = (floor.sqrt().recip() - ln_x.sqrt().recip()).abs();
    Ok(gap.with_bits(cfg.bits()))
}

/// `1/(2(ln x)^{3/2})`.
pub fn floor_root_gap_bound(point: &LogPoint, cfg: &PrecisionConfig) -> Result<Real> {
    let g = guard_bits(cfg);
    let ln_x = point.ln_x_at_least_e("floor_root_gap", g)?;
    let denom = &(&ln_x * &ln_x.sqrt()) * &ln_x.lit(2.0);
    Ok(denom.recip().with_bits(cfg.bits()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::delta::sweep;

    fn small_series(k_max: u64) -> DeltaSeries {
        let ks: Vec<u64> = (2..=k_max).collect();
        DeltaSeries::new(sweep(&ks, 4_000, &PrecisionConfig::fast()).unwrap(), k_max).unwrap()
    }

    #[test]
    fn anchor_contains_true_value() {
        let anchor = epsilon_one_anchor(192);
        let truth = Real::parse("0.8231640121031084798937665370210282287", 192).unwrap();
        assert!(anchor.contains(&truth));
        assert!(anchor.width().to_f64() < 2.1e-18);
    }

    #[test]
    fn first_bound_is_anchor() {
        let s = small_series(5);
        let b = epsilon_n_riemann(1, &s).unwrap();
        assert!((b.lo.to_f64() - 0.8231640121031085).abs() < 3e-16);
        assert!(b.accumulated_delta.is_zero());
    }

    #[test]
    fn series_reports_missing_record() {
        let mut recs = sweep(&[2, 3, 5], 100, &PrecisionConfig::fast()).unwrap();
        let err = DeltaSeries::new(recs.clone(), 5).unwrap_err();
        assert!(err.to_string().contains("k = 4"), "{err}");
        recs.truncate(2);
        let err = DeltaSeries::new(recs, 4).unwrap_err();
        assert!(err.to_string().contains("k = 4"), "{err}");
    }

    #[test]
    fn telescoped_width_is_accumulated_delta() {
        let s = small_series(30);
        let anchor_width = epsilon_one_anchor(53).width().to_f64();
        for b in epsilon_riemann_series(&s) {
            let width = (&b.hi - &b.lo).to_f64();
            let acc = b.accumulated_delta.to_f64();
            assert!((width - anchor_width - acc).abs() < 1e-14, "n = {}", b.n);
        }
    }

    #[test]
    fn telescoped_bounds_contain_direct_epsilon() {
        let s = small_series(12);
        let all = epsilon_riemann_series(&s);
        for n in [2u64, 7, 12] {
            let direct = crate::logint::epsilon_k(n as i64, &PrecisionConfig::fast()).unwrap();
            assert!(
                all[n as usize - 1].enclosure().unwrap().contains(&direct),
                "n = {n}"
            );
        }
    }

    #[test]
    fn kappa_values_for_small_s() {
        let s = small_series(3);
        let eps2 = epsilon_n_riemann(2, &s).unwrap();
        let kt = kappa_tau(2, &eps2, &PrecisionConfig::fast()).unwrap();
        assert!((kt.kappa_lo.to_f64() - 1.0425469052).abs() < 1e-10);
        assert!((kt.kappa_hi.to_f64() - 0.9777512372).abs() < 1e-10);
        assert!(kt.kappa_lo > 1.0 && kt.kappa_hi < 1.0);
        assert!(kappa_tau(3, &eps2, &PrecisionConfig::fast()).is_err());
    }

    #[test]
    fn simple_bound_requires_larger_index() {
        let s = small_series(3);
        let eps2 = epsilon_n_riemann(2, &s).unwrap();
        let cfg = PrecisionConfig::fast();
        let kt = kappa_tau(2, &eps2, &cfg).unwrap();
        assert!(epsilon_n_simple(2, &kt, &cfg).is_err());
        let b = epsilon_n_simple(3, &kt, &cfg).unwrap();
        assert!(b.lo <= b.hi);
    }

    #[test]
    fn envelope_far_out() {
        let cfg = PrecisionConfig::standard();
        let b = epsilon_x_bounds(&LogPoint::from_integer_exponent(2000), &[], &cfg).unwrap();
        let c = (2.0 * std::f64::consts::PI).sqrt() / 3.0;
        assert!((b.lo().to_f64() - (c / 2001f64.sqrt() - 3.5462e-6)).abs() < 1e-15);
        assert!((b.hi().to_f64() - (c / 2000f64.sqrt() + 2.1511e-6)).abs() < 1e-15);
    }

    #[test]
    fn epsilon_x_sandwich() {
        let s = small_series(12);
        let all = epsilon_riemann_series(&s);
        let cfg = PrecisionConfig::fast();
        let e = epsilon_x_bounds(&LogPoint::from_integer_exponent(1), &all, &cfg).unwrap();
        assert!((e.hi().to_f64() - 0.8231640121031085).abs() < 1e-15);
        let p = LogPoint::from_exponent(Real::from_f64(10.5, 53)).unwrap();
        let e = epsilon_x_bounds(&p, &all, &cfg).unwrap();
        assert!(*e.lo() == all[10].lo && *e.hi() == all[9].hi);
    }

    #[test]
    fn floor_root_gap_examples() {
        let cfg = PrecisionConfig::standard();
        let at = |t: f64| LogPoint::from_exponent(Real::from_f64(t, 192)).unwrap();
        assert!(floor_root_gap(&LogPoint::from_integer_exponent(7), &cfg)
            .unwrap()
            .is_zero());
        let g = floor_root_gap(&at(2.5), &cfg).unwrap().to_f64();
        assert!((g - 0.074_651_249_152_871_66).abs() < 1e-15);
        assert!(g <= floor_root_gap_bound(&at(2.5), &cfg).unwrap().to_f64());
        let g = floor_root_gap(&at(100.5), &cfg).unwrap();
        assert!(g <= floor_root_gap_bound(&at(100.5), &cfg).unwrap());
    }
}
