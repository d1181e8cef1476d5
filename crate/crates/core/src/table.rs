//! Critical values of the max-ratio statistic
//!
//! ```text
//! R_m = max_{1 <= i <= m} (e_i - e_{i+1}) / (e_{i+1} - e_{i+2})
//! ```
//!
//! under the joint Tracy–Widom law, approximated by the top `m + 2`
//! eigenvalues of large GUE draws. The statistic is invariant under
//! `e -> a e + b` for `a > 0`, so raw GUE eigenvalues are used directly.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quantile_sorted;
use crate::sampling::{gue_top_raw, GueMethod, SeedSpec};

pub const SCHEMA_VERSION: u32 = 1;

/// Stream ids with this bit set are reserved for replacement draws.
const REPLACEMENT_STREAM_FLAG: u64 = 1 << 63;
const MAX_REPLACEMENTS: u64 = 16;

/// Percentile rows of the reference table.
pub const REFERENCE_PERCENTILES: [f64; 15] = [
    0.50, 0.60, 0.70, 0.80, 0.85, 0.90, 0.91, 0.92, 0.93, 0.94, 0.95, 0.96, 0.97, 0.98, 0.99,
];

/// Reference critical values for `m = 1..=8`, one row per entry of
/// [`REFERENCE_PERCENTILES`] (1000 x 1000 GUE, 30,000 replicates).
pub const REFERENCE_VALUES: [[f64; 8]; 15] = [
    [1.27, 1.95, 2.30, 2.54, 2.74, 2.92, 3.09, 3.24],
    [1.53, 2.24, 2.59, 2.88, 3.10, 3.31, 3.49, 3.65],
    [1.86, 2.61, 3.01, 3.32, 3.59, 3.82, 4.01, 4.20],
    [2.37, 3.19, 3.65, 4.02, 4.32, 4.59, 4.83, 5.05],
    [2.75, 3.62, 4.15, 4.54, 4.89, 5.20, 5.45, 5.70],
    [3.33, 4.31, 4.91, 5.40, 5.77, 6.13, 6.42, 6.66],
    [3.50, 4.49, 5.13, 5.62, 6.03, 6.39, 6.67, 6.92],
    [3.69, 4.72, 5.37, 5.91, 6.31, 6.68, 6.95, 7.25],
    [3.92, 4.99, 5.66, 6.24, 6.62, 7.00, 7.32, 7.59],
    [4.20, 5.31, 6.03, 6.57, 7.00, 7.41, 7.74, 8.04],
    [4.52, 5.73, 6.46, 7.01, 7.50, 7.95, 8.29, 8.59],
    [5.02, 6.26, 6.97, 7.63, 8.16, 8.61, 9.06, 9.36],
    [5.62, 6.91, 7.79, 8.48, 9.06, 9.64, 10.11, 10.44],
    [6.55, 8.15, 9.06, 9.93, 10.47, 11.27, 11.75, 12.13],
    [8.74, 10.52, 11.67, 12.56, 13.42, 14.26, 14.88, 15.25],
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMeta {
    pub gue_n: usize,
    pub reps: usize,
    pub base_seed: Option<u64>,
    pub created: String,
    pub software_version: String,
    pub method: GueMethod,
    /// Replicates redrawn from a reserved stream after a tied spectrum.
    pub replaced_replicates: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Percentile grid of `R_m`; `values` is row-major `percentiles x m_values`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalTable {
    pub m_values: Vec<usize>,
    pub percentiles: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: TableMeta,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    schema_version: u32,
    meta: TableMeta,
    percentiles: Vec<f64>,
    m_values: Vec<usize>,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: Option<u32>,
}

const PERCENTILE_MATCH_TOL: f64 = 1e-9;

impl CriticalTable {
    /// The reference critical values as a table.
    pub fn reference() -> Self {
        Self {
            m_values: (1..=8).collect(),
            percentiles: REFERENCE_PERCENTILES.to_vec(),
            values: REFERENCE_VALUES.iter().flatten().copied().collect(),
            meta: TableMeta {
                gue_n: 1000,
                reps: 30_000,
                base_seed: None,
                created: "2008-01-01T00:00:00Z".into(),
                software_version: "reference".into(),
                method: GueMethod::Dense,
                replaced_replicates: 0,
                note: Some("two-decimal reference values".into()),
            },
        }
    }

    pub fn rows(&self) -> usize {
        self.percentiles.len()
    }

    pub fn cols(&self) -> usize {
        self.m_values.len()
    }

    fn column_index(&self, m: usize) -> Option<usize> {
        self.m_values.iter().position(|&v| v == m)
    }

    fn row_index(&self, prob: f64) -> Option<usize> {
        self.percentiles
            .iter()
            .position(|&p| (p - prob).abs() <= PERCENTILE_MATCH_TOL)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols() + col]
    }

    pub fn column(&self, m: usize) -> Option<Vec<f64>> {
        let c = self.column_index(m)?;
        Some((0..self.rows()).map(|r| self.get(r, c)).collect())
    }

    /// Critical value at probability `level` for `m = kmax - k0`.
    pub fn critical_value(&self, level: f64, m: usize) -> Result<f64> {
        let c = self
            .column_index(m)
            .ok_or_else(|| Error::Configuration(format!("table has no column m = {m}")))?;
        let r = self
            .row_index(level)
            .ok_or_else(|| Error::Configuration(format!("table has no percentile row {level}")))?;
        Ok(self.get(r, c))
    }

    /// Piecewise-linear inverse lookup of a statistic in column `m`,
    /// clamped to the first and last percentile.
    pub fn percentile_of(&self, statistic: f64, m: usize) -> Result<f64> {
        let col = self
            .column(m)
            .ok_or_else(|| Error::Configuration(format!("table has no column m = {m}")))?;
        if statistic <= col[0] {
            return Ok(self.percentiles[0]);
        }
        let last = col.len() - 1;
        if statistic >= col[last] {
            return Ok(self.percentiles[last]);
        }
        let i = col.windows(2).position(|w| statistic < w[1]).unwrap_or(last - 1);
        let frac = (statistic - col[i]) / (col[i + 1] - col[i]);
        Ok(self.percentiles[i] + frac * (self.percentiles[i + 1] - self.percentiles[i]))
    }

    /// Shape and monotonicity checks.
    pub fn validate(&self) -> Result<()> {
        if self.m_values.is_empty() || self.percentiles.is_empty() {
            return Err(Error::Format("table has no rows or columns".into()));
        }
        if self.values.len() != self.rows() * self.cols() {
            return Err(Error::Format(format!(
                "expected {} values, found {}",
                self.rows() * self.cols(),
                self.values.len()
            )));
        }
        if self.percentiles.iter().any(|p| !(*p > 0.0 && *p < 1.0)) || self.percentiles.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::Format(
                "percentiles must be strictly increasing in (0, 1)".into(),
            ));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format("table contains non-finite values".into()));
        }
        for c in 0..self.cols() {
            for r in 1..self.rows() {
                if self.get(r, c) <= self.get(r - 1, c) {
                    return Err(Error::Format(format!(
                        "column m = {} is not strictly increasing at row {r}",
                        self.m_values[c]
                    )));
                }
            }
        }
        let mut order: Vec<usize> = (0..self.cols()).collect();
        order.sort_by_key(|&c| self.m_values[c]);
        for r in 0..self.rows() {
            for w in order.windows(2) {
                if self.get(r, w[1]) < self.get(r, w[0]) {
                    return Err(Error::Format(format!(
                        "row {} decreases between m = {} and m = {}",
                        self.percentiles[r], self.m_values[w[0]], self.m_values[w[1]]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let file = TableFile {
            schema_version: SCHEMA_VERSION,
            meta: self.meta.clone(),
            percentiles: self.percentiles.clone(),
            m_values: self.m_values.clone(),
            values: self.values.clone(),
        };
        serde_json::to_string_pretty(&file).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let probe: VersionProbe =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("not a table document: {e}")))?;
        match probe.schema_version {
            Some(SCHEMA_VERSION) => {}
            Some(v) => {
                return Err(Error::Format(format!(
                    "unsupported schema_version {v}, expected {SCHEMA_VERSION}"
                )))
            }
            None => return Err(Error::Format("missing schema_version".into())),
        }
        let file: TableFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let table = Self {
            m_values: file.m_values,
            percentiles: file.percentiles,
            values: file.values,
            meta: file.meta,
        };
        if table.values.len() != table.rows() * table.cols() {
            return Err(Error::Format(format!(
                "expected {} values, found {}",
                table.rows() * table.cols(),
                table.values.len()
            )));
        }
        Ok(table)
    }
}

/// Writes the table through a sibling temporary file and a rename.
pub fn save_table(table: &CriticalTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let json = table.to_json()?;
    write_atomic(path, json.as_bytes())
}

pub fn load_table(path: impl AsRef<Path>) -> Result<CriticalTable> {
    let text = fs::read_to_string(path)?;
    CriticalTable::from_json(&text)
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidInput(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::Io(e)
    })
}

/// `max_{1 <= i <= m} (e_i - e_{i+1}) / (e_{i+1} - e_{i+2})` for descending `e`.
pub fn ratio_statistic(eigs: &[f64], m: usize) -> Result<f64> {
    Ok(*ratio_statistics(eigs, m)?.last().expect("m >= 1"))
}

/// `[R_1, ..., R_m]` from one spectrum; nondecreasing by construction.
pub fn ratio_statistics(eigs: &[f64], m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::InvalidInput("m must be at least 1".into()));
    }
    if eigs.len() < m + 2 {
        return Err(Error::InvalidInput(format!(
            "need at least {} eigenvalues for m = {m}, got {}",
            m + 2,
            eigs.len()
        )));
    }
    if eigs[..m + 2].windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidInput("eigenvalues must be sorted descending".into()));
    }
    let mut out = Vec::with_capacity(m);
    let mut best = f64::NEG_INFINITY;
    for i in 0..m {
        let den = eigs[i + 1] - eigs[i + 2];
        if den <= 0.0 {
            return Err(Error::DegenerateSpectrum(format!(
                "tied eigenvalues at positions {} and {}",
                i + 2,
                i + 3
            )));
        }
        best = best.max((eigs[i] - eigs[i + 1]) / den);
        out.push(best);
    }
    Ok(out)
}

/// Monte Carlo tabulation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulateConfig {
    pub m_max: usize,
    pub gue_n: usize,
    pub reps: usize,
    pub percentiles: Vec<f64>,
    pub base_seed: u64,
    pub method: GueMethod,
}

impl TabulateConfig {
    /// Production scale: `N = 1000`, 30,000 replicates, reference rows.
    pub fn production(base_seed: u64) -> Self {
        Self {
            m_max: 8,
            gue_n: 1000,
            reps: 30_000,
            percentiles: REFERENCE_PERCENTILES.to_vec(),
            base_seed,
            method: GueMethod::Tridiagonal,
        }
    }

    /// Desk scale: `N = 400`, 8,000 replicates.
    pub fn desk(base_seed: u64) -> Self {
        Self {
            gue_n: 400,
            reps: 8_000,
            ..Self::production(base_seed)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.m_max == 0 {
            return Err(Error::InvalidInput("m_max must be at least 1".into()));
        }
        if self.gue_n < self.m_max + 2 {
            return Err(Error::InvalidInput(format!(
                "gue_n = {} must be at least m_max + 2 = {}",
                self.gue_n,
                self.m_max + 2
            )));
        }
        if self.reps < 100 {
            return Err(Error::InvalidInput(format!(
                "reps = {} below the minimum of 100",
                self.reps
            )));
        }
        if self.percentiles.is_empty()
            || self.percentiles.iter().any(|p| !(*p > 0.0 && *p < 1.0))
            || self.percentiles.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidInput(
                "percentiles must be non-empty, strictly increasing and inside (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// Per-replicate `[R_1, ..., R_{m_max}]` in stream order, plus the number of
/// replicates that were redrawn.
pub fn simulate_ratio_samples(cfg: &TabulateConfig) -> Result<(Vec<Vec<f64>>, usize)> {
    cfg.validate()?;
    let results: Vec<Result<(Vec<f64>, bool)>> = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|r| replicate(cfg, r))
        .collect();
    let mut samples = Vec::with_capacity(cfg.reps);
    let mut replaced = 0;
    for res in results {
        let (stats, was_replaced) = res?;
        replaced += usize::from(was_replaced);
        samples.push(stats);
    }
    Ok((samples, replaced))
}

fn replicate(cfg: &TabulateConfig, r: u64) -> Result<(Vec<f64>, bool)> {
    for attempt in 0..=MAX_REPLACEMENTS {
        let stream = if attempt == 0 {
            r
        } else {
            REPLACEMENT_STREAM_FLAG | (attempt << 40) | r
        };
        let seed = SeedSpec::new(cfg.base_seed, stream);
        let eigs = gue_top_raw(cfg.gue_n, cfg.m_max + 2, seed, cfg.method)?;
        match ratio_statistics(&eigs, cfg.m_max) {
            Ok(stats) => return Ok((stats, attempt > 0)),
            Err(Error::DegenerateSpectrum(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Numerical {
        message: format!("replicate {r} produced tied spectra {MAX_REPLACEMENTS} times"),
        iterations: MAX_REPLACEMENTS as usize,
    })
}

/// Builds the critical-value table from per-replicate samples.
pub fn tabulate(cfg: &TabulateConfig) -> Result<CriticalTable> {
    let (samples, replaced) = simulate_ratio_samples(cfg)?;
    let rows = cfg.percentiles.len();
    let cols = cfg.m_max;
    let mut values = vec![0.0; rows * cols];
    for c in 0..cols {
        let mut column: Vec<f64> = samples.iter().map(|s| s[c]).collect();
        column.sort_by(f64::total_cmp);
        for (r, &p) in cfg.percentiles.iter().enumerate() {
            values[r * cols + c] = quantile_sorted(&column, p)?;
        }
    }
    Ok(CriticalTable {
        m_values: (1..=cols).collect(),
        percentiles: cfg.percentiles.clone(),
        values,
        meta: TableMeta {
            gue_n: cfg.gue_n,
            reps: cfg.reps,
            base_seed: Some(cfg.base_seed),
            created: creation_timestamp(),
            software_version: env!("CARGO_PKG_VERSION").into(),
            method: cfg.method,
            replaced_replicates: replaced,
            note: None,
        },
    })
}

/// RFC 3339 UTC time, taken from `SOURCE_DATE_EPOCH` when set.
pub fn creation_timestamp() -> String {
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0))
        .unwrap_or_else(chrono::Utc::now);
    now.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}
