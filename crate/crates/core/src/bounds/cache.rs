//! Plain-text store of [`DeltaRecord`]s keyed by `(precision, M, k)`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::delta::{sweep, DeltaRecord};
use super::epsilon::DeltaSeries;
use crate::error::{Error, Result};
use crate::numerics::{PrecisionConfig, Real, FAST_BITS, MAX_BITS};

/// Environment variable overriding the cache location.
pub const CACHE_ENV: &str = "STERR_CACHE";
pub const CACHE_HEADER: &str = "# k,M,precision_bits,S_lower,S_upper,u_star,f_at_ustar";

type Key = (u32, u64, u64);

#[derive(Clone, Debug, Default)]
pub struct DeltaCache {
    records: BTreeMap<Key, DeltaRecord>,
}

fn key(r: &DeltaRecord) -> Key {
    (r.precision_bits, r.m, r.k)
}

pub fn format_record(r: &DeltaRecord) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        r.k,
        r.m,
        r.precision_bits,
        r.s_lower.to_exact_string(),
        r.s_upper.to_exact_string(),
        r.u_star.to_exact_string(),
        r.f_at_ustar.to_exact_string()
    )
}

fn parse_record(line: &str, number: usize) -> Result<DeltaRecord> {
    let bad = |detail: String| Error::CacheFormat {
        line: number,
        detail,
    };
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 7 {
        return Err(bad(format!("expected 7 fields, found {}", fields.len())));
    }
    let int = |i: usize, name: &str| {
        fields[i]
            .parse::<u64>()
            .map_err(|_| bad(format!("{name} is not an integer: {:?}", fields[i])))
    };
    let k = int(0, "k")?;
    let m = int(1, "M")?;
    let bits = int(2, "precision_bits")?;
    if k < 2 || m < 2 {
        return Err(bad(format!("k = {k} and M = {m} must both be at least 2")));
    }
    if !(u64::from(FAST_BITS)..=u64::from(MAX_BITS)).contains(&bits) {
        return Err(bad(format!("precision_bits {bits} out of range")));
    }
    let bits = bits as u32;
    let real = |i: usize, name: &str| {
        Real::parse(fields[i], bits)
            .map_err(|_| bad(format!("{name} is not a number: {:?}", fields[i])))
    };
    let rec = DeltaRecord {
        k,
        m,
        precision_bits: bits,
        s_lower: real(3, "S_lower")?,
        s_upper: real(4, "S_upper")?,
        u_star: real(5, "u_star")?,
        f_at_ustar: real(6, "f_at_ustar")?,
    };
    if rec.s_lower > rec.s_upper {
        return Err(bad("S_lower exceeds S_upper".into()));
    }
    Ok(rec)
}

impl DeltaCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<DeltaCache> {
        let mut cache = DeltaCache::new();
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            cache.insert(parse_record(trimmed, i + 1)?);
        }
        Ok(cache)
    }

    /// Reads a cache file; a missing file is an empty cache.
    pub fn load(path: &Path) -> Result<DeltaCache> {
        match fs::read_to_string(path) {
            Ok(text) => DeltaCache::parse(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(DeltaCache::new()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from(CACHE_HEADER);
        out.push('\n');
        for r in self.records.values() {
            out.push_str(&format_record(r));
            out.push('\n');
        }
        out
    }

    /// Writes atomically by renaming a sibling temporary file.
    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        fs::write(&tmp, self.to_text())?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Inserts a record; returns `false` when the key was already present.
    pub fn insert(&mut self, rec: DeltaRecord) -> bool {
        let k = key(&rec);
        if self.records.contains_key(&k) {
            return false;
        }
        self.records.insert(k, rec);
        true
    }

    pub fn get(&self, k: u64, m: u64, bits: u32) -> Option<&DeltaRecord> {
        self.records.get(&(bits, m, k))
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &DeltaRecord> {
        self.records.values()
    }

    /// Distinct `(precision_bits, M)` groups with their record counts.
    pub fn groups(&self) -> Vec<(u32, u64, usize)> {
        let mut out: Vec<(u32, u64, usize)> = Vec::new();
        for &(bits, m, _) in self.records.keys() {
            match out.last_mut() {
                Some(last) if last.0 == bits && last.1 == m => last.2 += 1,
                _ => out.push((bits, m, 1)),
            }
        }
        out
    }

    /// Keeps only records for which `keep` is true; returns how many were removed.
    pub fn retain(&mut self, mut keep: impl FnMut(&DeltaRecord) -> bool) -> usize {
        let before = self.records.len();
        self.records.retain(|_, r| keep(r));
        before - self.records.len()
    }

    /// Computes every missing record among `ks`; returns how many were added.
    pub fn fill(&mut self, ks: &[u64], m: u64, cfg: &PrecisionConfig) -> Result<usize> {
        let missing: Vec<u64> = ks
            .iter()
            .copied()
            .filter(|&k| self.get(k, m, cfg.bits()).is_none())
            .collect();
        let fresh = sweep(&missing, m, cfg)?;
        let added = fresh.len();
        for r in fresh {
            self.insert(r);
        }
        Ok(added)
    }

    /// Records `k = 2..=k_max` at `(m, bits)` as a series.
    pub fn series(&self, k_max: u64, m: u64, bits: u32) -> Result<DeltaSeries> {
        let recs: Vec<DeltaRecord> = (2..=k_max)
            .map(|k| {
                self.get(k, m, bits).cloned().ok_or_else(|| {
                    Error::Dependency(format!(
                        "no delta record for k = {k} (M = {m}, {bits} bits); run `sweep` first"
                    ))
                })
            })
            .collect::<Result<_>>()?;
        DeltaSeries::new(recs, k_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let mut cache = DeltaCache::new();
        for bits in [53, 192] {
            let cfg = PrecisionConfig::new(bits).unwrap();
            cache.fill(&[2, 3, 9], 500, &cfg).unwrap();
        }
        let text = cache.to_text();
        let back = DeltaCache::parse(&text).unwrap();
        assert_eq!(back.len(), 6);
        assert_eq!(back.to_text(), text);
        for r in cache.records() {
            assert_eq!(back.get(r.k, r.m, r.precision_bits).unwrap(), r);
        }
    }

    #[test]
    fn fill_is_idempotent() {
        let mut cache = DeltaCache::new();
        let cfg = PrecisionConfig::fast();
        assert_eq!(cache.fill(&[2, 3, 4], 100, &cfg).unwrap(), 3);
        assert_eq!(cache.fill(&[2, 3, 4], 100, &cfg).unwrap(), 0);
        assert_eq!(cache.fill(&[2, 3, 4, 5], 100, &cfg).unwrap(), 1);
        assert_eq!(cache.groups(), vec![(53, 100, 4)]);
    }

    #[test]
    fn corrupted_line_is_named() {
        let text = format!("{CACHE_HEADER}\n2,100,53,0.1,0.2,0.36,0.35\n3,100,53,zz,0.2,0.4,0.3\n");
        match DeltaCache::parse(&text) {
            Err(Error::CacheFormat { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let short = "2,100,53,0.1\n";
        assert!(matches!(
            DeltaCache::parse(short),
            Err(Error::CacheFormat { line: 1, .. })
        ));
    }

    #[test]
    fn series_names_missing_k() {
        let mut cache = DeltaCache::new();
        cache
            .fill(&[2, 3, 5], 100, &PrecisionConfig::fast())
            .unwrap();
        let err = cache.series(5, 100, 53).unwrap_err();
        assert!(err.to_string().contains("k = 4"));
    }

    #[test]
    fn load_missing_file_is_empty() {
        let path = std::env::temp_dir().join("sterr-cache-that-does-not-exist.csv");
        assert!(DeltaCache::load(&path).unwrap().is_empty());
    }
}
