//! Lookup table for the constants `K = P(C/I > 1)` and `C = G(0)`, which
//! depend on the system only through the ratio `eps / l`.
//!
//! Values live in a process-wide cache and, when `SCS_LOOKUP_DIR` is set, in
//! `constants.csv` inside that directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::charfn::CharFn;
use super::fewbs::FewBsConstants;
use super::inversion::tail_from_charfn;

pub const LOOKUP_ENV: &str = "SCS_LOOKUP_DIR";
const LOOKUP_FILE: &str = "constants.csv";

/// `K` and `C` for one ratio, each with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioConstants {
    pub ratio: f64,
    pub k: f64,
    pub k_err: f64,
    pub c: f64,
    pub c_err: f64,
}

impl RatioConstants {
    /// Compute from scratch, bypassing any cache.
    pub fn compute(ratio: f64) -> Result<Self> {
        if !(ratio > 1.0 && ratio.is_finite()) {
            return Err(Error::stability(format!("eps / l = {ratio} must exceed 1")));
        }
        let k = tail_from_charfn(&CharFn::power_law(1.0 / ratio), 1.0)?;
        // FewBsConstants only uses the ratio, so a 1-D field stands in.
        let fb = FewBsConstants::new(ratio, 1)?;
        Ok(Self {
            ratio,
            k: k.p,
            k_err: k.err,
            c: fb.c,
            c_err: fb.c_err,
        })
    }
}

/// Cache key: the ratio rounded to six decimals.
pub fn ratio_key(ratio: f64) -> String {
    format!("{ratio:.6}")
}

fn cache() -> &'static Mutex<BTreeMap<String, RatioConstants>> {
    static CACHE: OnceLock<Mutex<BTreeMap<String, RatioConstants>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(BTreeMap::new()))
}

fn lookup_path() -> Option<PathBuf> {
    std::env::var_os(LOOKUP_ENV).map(|d| PathBuf::from(d).join(LOOKUP_FILE))
}

/// Read a lookup file; a missing file is an empty table.
pub fn read_lookup(path: &Path) -> Result<BTreeMap<String, RatioConstants>> {
    let mut out = BTreeMap::new();
    if !path.exists() {
        return Ok(out);
    }
    let mut rdr = csv::Reader::from_path(path)?;
    for row in rdr.deserialize::<LookupRow>() {
        let row = row?;
        out.insert(row.key.clone(), row.into());
    }
    Ok(out)
}

/// Write a lookup file through a temporary file so readers never see a
/// partial table.
pub fn write_lookup(path: &Path, table: &BTreeMap<String, RatioConstants>) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension(format!("csv.{}.tmp", std::process::id()));
    {
        let mut w = csv::Writer::from_path(&tmp)?;
        for (key, c) in table {
            w.serialize(LookupRow::new(key, c))?;
        }
        w.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct LookupRow {
    key: String,
    ratio: f64,
    k: f64,
    k_err: f64,
    c: f64,
    c_err: f64,
}

impl LookupRow {
    fn new(key: &str, c: &RatioConstants) -> Self {
        Self {
            key: key.to_string(),
            ratio: c.ratio,
            k: c.k,
            k_err: c.k_err,
            c: c.c,
            c_err: c.c_err,
        }
    }
}

impl From<LookupRow> for RatioConstants {
    fn from(r: LookupRow) -> Self {
        Self {
            ratio: r.ratio,
            k: r.k,
            k_err: r.k_err,
            c: r.c,
            c_err: r.c_err,
        }
    }
}

/// Constants for `eps / l`, from the cache, the lookup file, or computed
/// and then stored in both.
pub fn ratio_constants(epsilon: f64, l: usize) -> Result<RatioConstants> {
    crate::point_process::unit_sphere_measure(l)?;
    let ratio = epsilon / l as f64;
    let key = ratio_key(ratio);
    if let Some(c) = cache().lock().expect("constants cache poisoned").get(&key) {
        return Ok(*c);
    }
    let file = lookup_path();
    if let Some(path) = &file {
        if let Some(c) = read_lookup(path)?.get(&key) {
            cache()
                .lock()
                .expect("constants cache poisoned")
                .insert(key, *c);
            return Ok(*c);
        }
    }
    let computed = RatioConstants::compute(ratio)?;
    // First writer wins so every caller sees the same value.
    let value = *cache()
        .lock()
        .expect("constants cache poisoned")
        .entry(key.clone())
        .or_insert(computed);
    if let Some(path) = &file {
        let mut table = read_lookup(path)?;
        table.entry(key).or_insert(value);
        write_lookup(path, &table)?;
    }
    Ok(value)
}

/// `K = P(C/I > 1)` of a homogeneous `l`-D field with exponent `eps`.
pub fn k_constant(epsilon: f64, l: usize) -> Result<f64> {
    Ok(ratio_constants(epsilon, l)?.k)
}
