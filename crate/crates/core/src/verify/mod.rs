//! Reproduction of the published tables, the conjecture band sweep, the
//! monotonicity checks and the inequality property suites, assembled into
//! a [`VerificationReport`].

pub mod checks;
pub mod report;
pub mod tables;

use rayon::prelude::*;

pub use checks::{
    default_samples, verify_accumulated_delta, verify_conjecture_band, verify_epsilon_one,
    verify_exp_power, verify_exp_series, verify_factorial_expr, verify_floor_root_gap,
    verify_floor_root_gap_floor, verify_log_ratio, verify_monotonicity, verify_positivity,
    verify_robbins,
};
pub use report::{CheckResult, Metadata, Status, VerificationReport};
pub use tables::{
    compute_table, published_table, reproduce_table, table_diff, tolerances, CellDiff, Table,
    TableRow, TableSource, Tolerance, TABLE_IDS,
};

use crate::bounds::{DeltaCache, DeltaSeries};
use crate::constants::{TABLE_M, TABLE_ROWS, TELESCOPE_LIMIT};
use crate::error::{Error, Result};
use crate::numerics::{PrecisionConfig, FAST_BITS};

/// Every check, in report order.
pub const REGISTRY: [&str; 19] = [
    "epsilon-one",
    "table-2",
    "accumulated-delta",
    "table-1",
    "table-3",
    "table-4",
    "conjecture",
    "positivity",
    "monotonicity",
    "robbins",
    "factorial-expr",
    "exp-power",
    "log-ratio",
    "appendix-a",
    "appendix-a-floor",
    "appendix-b-partial-sum",
    "appendix-b-even-partial-sum",
    "appendix-b-geometric",
    "appendix-b-geometric-nonneg",
];

/// Checks that read the table rows or the `M = 10^6` telescoped bounds.
const TABLE_CHECKS: [&str; 4] = ["table-1", "table-2", "table-3", "table-4"];

const SWEEP_CHECKS: [&str; 3] = ["conjecture", "positivity", "monotonicity"];

/// Largest `n` in the Robbins suite (`170!` is the largest factorial below `f64::MAX`).
pub const ROBBINS_N_MAX: u64 = 170;

/// Largest `n` in the factorial, exponential-power and log-ratio suites.
pub const SANDWICH_N_MAX: u64 = 50;

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// Precision of the table rows and closed forms.
    pub precision: PrecisionConfig,
    /// Precision of the `k = 2..=k_max` sweeps.
    pub sweep_bits: u32,
    /// Subdivisions of the sweep behind the band, positivity and monotonicity checks.
    pub sweep_m: u64,
    pub k_max: u64,
    pub grid_density: u64,
    /// Number of `x` samples in `[e, e^50]` for the `ε(x)` monotonicity check.
    pub samples: usize,
    pub skip_tables: bool,
    /// Restricts the run to these check names; the rest are reported as skipped.
    pub only: Option<Vec<String>>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            precision: PrecisionConfig::standard(),
            sweep_bits: FAST_BITS,
            sweep_m: TABLE_M,
            k_max: TELESCOPE_LIMIT,
            grid_density: 100,
            samples: 100,
            skip_tables: false,
            only: None,
        }
    }
}

impl VerifyConfig {
    fn validate(&self) -> Result<()> {
        if self.k_max < 1 {
            return Err(Error::domain("verify", "k_max must be at least 1"));
        }
        if self.sweep_m < 2 {
            return Err(Error::domain("verify", "M must be at least 2"));
        }
        if let Some(only) = &self.only {
            for name in only {
                if !REGISTRY.contains(&name.as_str()) {
                    return Err(Error::domain(
                        "verify",
                        format!(
                            "unknown check {name:?}; known checks: {}",
                            REGISTRY.join(", ")
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    /// `None` when `name` runs, otherwise why it is skipped.
    fn skip_reason(&self, name: &str) -> Option<&'static str> {
        if self.skip_tables && TABLE_CHECKS.contains(&name) {
            return Some("tables skipped");
        }
        if let Some(only) = &self.only {
            if !only.iter().any(|n| n == name) {
                return Some("not selected");
            }
        }
        None
    }

    fn runs_any(&self, names: &[&str]) -> bool {
        names.iter().any(|n| self.skip_reason(n).is_none())
    }

    fn sweep_config(&self) -> Result<PrecisionConfig> {
        PrecisionConfig::new(self.sweep_bits)
    }
}

/// Computes any records the selected checks need that `cache` lacks;
/// returns how many were added.
pub fn prepare_cache(config: &VerifyConfig, cache: &mut DeltaCache) -> Result<usize> {
    config.validate()?;
    let sweep_cfg = config.sweep_config()?;
    let mut added = 0;
    if config.runs_any(&SWEEP_CHECKS) && config.k_max >= 2 {
        let ks: Vec<u64> = (2..=config.k_max).collect();
        added += cache.fill(&ks, config.sweep_m, &sweep_cfg)?;
    }
    if config.runs_any(&["table-1", "table-3", "accumulated-delta"]) {
        let ks: Vec<u64> = (2..=TELESCOPE_LIMIT).collect();
        added += cache.fill(&ks, TABLE_M, &sweep_cfg)?;
    }
    if config.runs_any(&["table-2", "table-4"]) {
        added += cache.fill(&TABLE_ROWS, TABLE_M, &config.precision)?;
    }
    Ok(added)
}

fn run_one(
    name: &str,
    config: &VerifyConfig,
    cache: &DeltaCache,
    band: Option<&DeltaSeries>,
) -> Result<CheckResult> {
    let cfg = &config.precision;
    let src = TableSource {
        cache,
        sweep_bits: config.sweep_bits,
        cfg: *cfg,
    };
    let band = || band.ok_or_else(|| Error::Dependency("sweep series unavailable".into()));
    let d = config.grid_density;
    match name {
        "epsilon-one" => verify_epsilon_one(cfg),
        "table-1" => reproduce_table(1, &src),
        "table-2" => reproduce_table(2, &src),
        "table-3" => reproduce_table(3, &src),
        "table-4" => reproduce_table(4, &src),
        "accumulated-delta" => {
            verify_accumulated_delta(&cache.series(TELESCOPE_LIMIT, TABLE_M, config.sweep_bits)?)
        }
        "conjecture" => verify_conjecture_band(band()?, cfg),
        "positivity" => verify_positivity(band()?),
        "monotonicity" => {
            verify_monotonicity(band()?, &default_samples(config.samples, cfg.bits()), cfg)
        }
        "robbins" => verify_robbins(ROBBINS_N_MAX, cfg),
        "factorial-expr" => verify_factorial_expr(SANDWICH_N_MAX, cfg),
        "exp-power" => verify_exp_power(SANDWICH_N_MAX, cfg),
        "log-ratio" => verify_log_ratio(SANDWICH_N_MAX, d, cfg),
        "appendix-a" => verify_floor_root_gap(d, cfg),
        "appendix-a-floor" => verify_floor_root_gap_floor(d, cfg),
        other => {
            let all = verify_exp_series(d, cfg);
            all.into_iter()
                .find(|c| c.name == other)
                .ok_or_else(|| Error::domain("verify", format!("unknown check {other:?}")))
        }
    }
}

/// Runs every registered check against an already prepared `cache`.
/// Checks run in parallel; the report keeps registry order.
pub fn run_checks(config: &VerifyConfig, cache: &DeltaCache) -> Result<VerificationReport> {
    config.validate()?;
    let band = if config.runs_any(&SWEEP_CHECKS) {
        Some(cache.series(config.k_max, config.sweep_m, config.sweep_bits)?)
    } else {
        None
    };
    let checks = REGISTRY
        .par_iter()
        .map(|&name| match config.skip_reason(name) {
            Some(reason) => Ok(CheckResult::skipped(name, reason)),
            None => run_one(name, config, cache, band.as_ref()),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport {
        metadata: Metadata::new(
            config.precision.bits(),
            config.sweep_bits,
            config.sweep_m,
            config.k_max,
        ),
        checks,
    })
}

/// [`prepare_cache`] followed by [`run_checks`].
pub fn run_all(config: &VerifyConfig, cache: &mut DeltaCache) -> Result<VerificationReport> {
    prepare_cache(config, cache)?;
    run_checks(config, cache)
}
