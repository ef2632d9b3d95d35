//! Recomputation of the four published tables and cell-by-cell comparison.

use serde::Serialize;

use super::report::{CheckResult, Tally};
use crate::bounds::{
    delta_k_simple, epsilon_riemann_series, kappa_tau, DeltaCache, DeltaRecord, EpsilonBound,
};
use crate::constants::{
    DELTA_TABLE, EPSILON_TABLE, KAPPA_TAU_TABLE, SIMPLE_GAP_TABLE, TABLE_M, TABLE_ROWS,
    TELESCOPE_LIMIT,
};
use crate::error::{Error, Result};
use crate::numerics::{Dir, PrecisionConfig, Real};

pub const TABLE_IDS: [u8; 4] = [1, 2, 3, 4];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tolerance {
    Absolute(f64),
    Relative(f64),
}

impl Tolerance {
    /// Error of `computed` against `published` in this tolerance's units.
    pub fn error(self, computed: &Real, published: &Real) -> f64 {
        let diff = (computed - published).abs().to_f64();
        match self {
            Tolerance::Absolute(_) => diff,
            Tolerance::Relative(_) => diff / published.abs().to_f64(),
        }
    }

    pub fn bound(self) -> f64 {
        match self {
            Tolerance::Absolute(t) | Tolerance::Relative(t) => t,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TableRow {
    pub index: u64,
    pub cells: Vec<Real>,
}

#[derive(Clone, Debug)]
pub struct Table {
    pub id: u8,
    pub index_name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<TableRow>,
}

fn check_id(id: u8) -> Result<()> {
    if !TABLE_IDS.contains(&id) {
        return Err(Error::domain(
            "table",
            format!("table id must be 1, 2, 3 or 4, got {id}"),
        ));
    }
    Ok(())
}

fn layout(id: u8) -> (&'static str, Vec<&'static str>) {
    match id {
        1 => ("n", vec!["eps_lo", "eps_hi"]),
        2 => ("k", vec!["S_lower", "delta"]),
        3 => ("s", vec!["kappa_lo", "tau_lo", "kappa_hi", "tau_hi"]),
        _ => (
            "k",
            vec!["S_lower_minus_Delta_lower", "Delta_upper_minus_S_upper"],
        ),
    }
}

pub fn tolerances(id: u8) -> Result<Vec<Tolerance>> {
    check_id(id)?;
    Ok(match id {
        1 => vec![Tolerance::Absolute(1e-12); 2],
        2 => vec![Tolerance::Absolute(1e-17), Tolerance::Relative(1e-9)],
        3 => vec![Tolerance::Absolute(1e-10); 4],
        _ => vec![Tolerance::Absolute(1e-12); 2],
    })
}

/// The published values, parsed at `bits`.
pub fn published_table(id: u8, bits: u32) -> Result<Table> {
    check_id(id)?;
    let parse = |cells: &[&str]| {
        cells
            .iter()
            .map(|c| Real::parse(c, bits))
            .collect::<Result<Vec<_>>>()
    };
    let rows = match id {
        1 => EPSILON_TABLE
            .iter()
            .map(|(n, lo, hi)| {
                Ok(TableRow {
                    index: *n,
                    cells: parse(&[lo, hi])?,
                })
            })
            .collect::<Result<Vec<_>>>()?,
        2 => DELTA_TABLE
            .iter()
            .map(|(k, s, d)| {
                Ok(TableRow {
                    index: *k,
                    cells: parse(&[s, d])?,
                })
            })
            .collect::<Result<Vec<_>>>()?,
        3 => KAPPA_TAU_TABLE
            .iter()
            .map(|(s, a, b, c, d)| {
                Ok(TableRow {
                    index: *s,
                    cells: parse(&[a, b, c, d])?,
                })
            })
            .collect::<Result<Vec<_>>>()?,
        _ => SIMPLE_GAP_TABLE
            .iter()
            .map(|(k, l, r)| {
                Ok(TableRow {
                    index: *k,
                    cells: parse(&[l, r])?,
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let (index_name, columns) = layout(id);
    Ok(Table {
        id,
        index_name,
        columns,
        rows,
    })
}

/// Where the recomputed tables draw their records from.
#[derive(Clone, Copy, Debug)]
pub struct TableSource<'a> {
    pub cache: &'a DeltaCache,
    /// Precision of the full `k = 2..=1000` sweep behind tables 1 and 3.
    pub sweep_bits: u32,
    /// Precision of the eight rows behind tables 2 and 4, and of closed forms.
    pub cfg: PrecisionConfig,
}

impl TableSource<'_> {
    /// Telescoped bounds for `n = 1..=1000` at `M = 10^6`.
    pub fn epsilon_bounds(&self) -> Result<Vec<EpsilonBound>> {
        let series = self
            .cache
            .series(TELESCOPE_LIMIT, TABLE_M, self.sweep_bits)?;
        Ok(epsilon_riemann_series(&series))
    }

    /// The eight tabulated `Δ_k` records at `M = 10^6` and full precision.
    pub fn rows(&self) -> Result<Vec<DeltaRecord>> {
        let bits = self.cfg.bits();
        TABLE_ROWS
            .iter()
            .map(|&k| {
                self.cache.get(k, TABLE_M, bits).cloned().ok_or_else(|| {
                    Error::Dependency(format!(
                        "no delta record for k = {k} (M = {TABLE_M}, {bits} bits); run \
                         `sweep --k-max 1000 --M {TABLE_M} --precision {bits} --only 2,5,10,50,100,200,500,1000`"
                    ))
                })
            })
            .collect()
    }
}

/// Recomputes table `id` in the published layout.
pub fn compute_table(id: u8, src: &TableSource<'_>) -> Result<Table> {
    check_id(id)?;
    let cfg = &src.cfg;
    let rows = match id {
        1 => {
            let eps = src.epsilon_bounds()?;
            EPSILON_TABLE
                .iter()
                .map(|&(n, _, _)| {
                    let b = &eps[n as usize - 1];
                    TableRow {
                        index: n,
                        cells: vec![b.lo.clone(), b.hi.clone()],
                    }
                })
                .collect()
        }
        2 => src
            .rows()?
            .into_iter()
            .map(|r| TableRow {
                index: r.k,
                cells: vec![r.s_lower.clone(), r.width()],
            })
            .collect(),
        3 => {
            let eps = src.epsilon_bounds()?;
            TABLE_ROWS
                .iter()
                .map(|&s| {
                    let kt = kappa_tau(s, &eps[s as usize - 1], cfg)?;
                    Ok(TableRow {
                        index: s,
                        cells: vec![kt.kappa_lo, kt.tau_lo, kt.kappa_hi, kt.tau_hi],
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        _ => src
            .rows()?
            .into_iter()
            .map(|r| {
                let simple = delta_k_simple(r.k, cfg)?;
                Ok(TableRow {
                    index: r.k,
                    cells: vec![
                        r.s_lower.sub_dir(simple.lo(), Dir::Down),
                        simple.hi().sub_dir(&r.s_upper, Dir::Down),
                    ],
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let (index_name, columns) = layout(id);
    Ok(Table {
        id,
        index_name,
        columns,
        rows,
    })
}

#[derive(Clone, Debug)]
pub struct CellDiff {
    pub index: u64,
    pub column: &'static str,
    pub computed: Real,
    pub published: Real,
    pub error: f64,
    pub tolerance: Tolerance,
}

impl CellDiff {
    pub fn ok(&self) -> bool {
        self.error <= self.tolerance.bound()
    }
}

/// Side-by-side comparison of a recomputed table with the published one.
pub fn table_diff(computed: &Table, published: &Table) -> Result<Vec<CellDiff>> {
    let tols = tolerances(computed.id)?;
    let mut out = Vec::new();
    for (c, p) in computed.rows.iter().zip(&published.rows) {
        if c.index != p.index {
            return Err(Error::domain(
                "table_diff",
                format!("row {} does not match published row {}", c.index, p.index),
            ));
        }
        for (j, tol) in tols.iter().enumerate() {
            out.push(CellDiff {
                index: c.index,
                column: computed.columns[j],
                computed: c.cells[j].clone(),
                published: p.cells[j].clone(),
                error: tol.error(&c.cells[j], &p.cells[j]),
                tolerance: *tol,
            });
        }
    }
    Ok(out)
}

fn check_name(id: u8) -> &'static str {
    match id {
        1 => "table-1",
        2 => "table-2",
        3 => "table-3",
        _ => "table-4",
    }
}

/// Recomputes table `id` and compares every cell under its tolerance;
/// table 4 additionally requires both gap columns to be positive.
pub fn reproduce_table(id: u8, src: &TableSource<'_>) -> Result<CheckResult> {
    check_id(id)?;
    let computed = compute_table(id, src)?;
    let published = published_table(id, src.cfg.bits())?;
    let digits = 25;
    let what = match id {
        4 => "recomputed cells match published values and gaps are positive",
        _ => "recomputed cells match published values",
    };
    let mut tally = Tally::new(check_name(id), what);
    for d in table_diff(&computed, &published)? {
        let scale = match d.tolerance {
            Tolerance::Absolute(_) => 1.0,
            Tolerance::Relative(_) => d.published.abs().to_f64(),
        };
        tally.observe(d.ok(), (d.tolerance.bound() - d.error) * scale, 0.0, || {
            (
                d.computed.to_fixed_string(digits),
                d.published.to_fixed_string(digits),
                format!(
                    "{} = {}, {} (error {:.3e}, tolerance {:?})",
                    computed.index_name, d.index, d.column, d.error, d.tolerance
                ),
            )
        });
    }
    if id == 4 {
        for row in &computed.rows {
            for (j, v) in row.cells.iter().enumerate() {
                tally.observe(!v.is_negative() && !v.is_zero(), v.to_f64(), 0.0, || {
                    (
                        v.to_fixed_string(digits),
                        "0".into(),
                        format!("k = {}, {} > 0", row.index, computed.columns[j]),
                    )
                });
            }
        }
    }
    Ok(tally.finish())
}
