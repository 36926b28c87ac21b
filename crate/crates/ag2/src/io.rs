//! JSON persistence, result caching and reproduction manifests.

use crate::algebra::LaurentFrac;
use crate::ba::{BAFunction, BuildRoute};
use crate::diffop::{DifferenceOperator, ExpPolynomial};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

/// Code-version tag baked into cache keys: cache entries are reused only
/// when this matches.
pub fn code_version() -> String {
    format!("{}-s{}", env!("CARGO_PKG_VERSION"), SCHEMA_VERSION)
}

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("schema mismatch: file has {found}, expected {expected}")]
    SchemaMismatch { found: u32, expected: u32 },
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// On-disk form of a constructed function.
#[derive(Serialize, Deserialize)]
pub struct BAFunctionFile {
    pub schema: u32,
    pub code_version: String,
    pub m: u32,
    pub via: BuildRoute,
    /// P in canonical term order, coefficients as Laurent fractions
    pub p: crate::algebra::MultiPoly<LaurentFrac>,
    pub degree_trace: Vec<usize>,
    pub c_divides_exactly: bool,
    pub verification: BTreeMap<String, bool>,
    /// wall-clock seconds of the build, informational only
    pub build_seconds: f64,
}

impl BAFunctionFile {
    pub fn from_ba(ba: &BAFunction, build_seconds: f64) -> Self {
        BAFunctionFile {
            schema: SCHEMA_VERSION,
            code_version: code_version(),
            m: ba.m,
            via: ba.via,
            p: ba.to_exp_polynomial().poly,
            degree_trace: ba.degree_trace.clone(),
            c_divides_exactly: ba.c_divides_exactly,
            verification: ba.verification.clone(),
            build_seconds,
        }
    }

    /// Rebuild the factored in-memory form (denominators re-factorized
    /// against the hyperbolic units).
    pub fn to_ba(&self) -> BAFunction {
        let exp = ExpPolynomial {
            poly: self.p.clone(),
        };
        let mut ba = BAFunction::from_exp_polynomial(self.m, self.via, &exp);
        ba.degree_trace = self.degree_trace.clone();
        ba.c_divides_exactly = self.c_divides_exactly;
        ba.verification = self.verification.clone();
        ba
    }
}

/// Atomic JSON write: temp file in the same directory, then rename.
pub fn save_json<T: Serialize>(value: &T, path: &Path) -> Result<(), IoError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        serde_json::to_writer(&mut f, value)?;
        f.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let data = std::fs::read(path)?;
    Ok(serde_json::from_slice(&data)?)
}

pub fn save_ba(ba: &BAFunction, build_seconds: f64, path: &Path) -> Result<(), IoError> {
    save_json(&BAFunctionFile::from_ba(ba, build_seconds), path)
}

pub fn load_ba(path: &Path) -> Result<BAFunctionFile, IoError> {
    let file: BAFunctionFile = load_json(path)?;
    if file.schema != SCHEMA_VERSION {
        return Err(IoError::SchemaMismatch {
            found: file.schema,
            expected: SCHEMA_VERSION,
        });
    }
    Ok(file)
}

pub fn save_operator(d: &DifferenceOperator, path: &Path) -> Result<(), IoError> {
    save_json(d, path)
}

pub fn load_operator(path: &Path) -> Result<DifferenceOperator, IoError> {
    load_json(path)
}

/// The cache directory: `AG2_CACHE_DIR` or `.ag2-cache` under the current
/// directory.
pub fn cache_dir() -> PathBuf {
    std::env::var_os("AG2_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".ag2-cache"))
}

pub fn ba_cache_path(m: u32, via: BuildRoute) -> PathBuf {
    cache_dir().join(format!("ba-m{}-{}-{}.ba.json", m, via, code_version()))
}

/// Load-or-build with disk caching keyed by (m, via, code version).
/// Returns the function and whether the cache was hit.
pub fn cached_ba(m: u32, via: BuildRoute) -> Result<(BAFunction, bool), String> {
    let path = ba_cache_path(m, via);
    if path.exists() {
        match load_ba(&path) {
            Ok(file) if file.code_version == code_version() => {
                return Ok((file.to_ba(), true));
            }
            _ => {}
        }
    }
    let t0 = std::time::Instant::now();
    let ba = crate::ba::construct_ba(m, via).map_err(|e| e.to_string())?;
    let _ = save_ba(&ba, t0.elapsed().as_secs_f64(), &path);
    Ok((ba, false))
}

/// FNV-1a 64-bit content hash, hex-encoded; used for manifest artifact
/// fingerprints.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{:016x}", h)
}

/// One manifest line per CLI run, appended to `manifest.jsonl` in the
/// cache directory.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub code_version: String,
    pub elapsed_ms: u128,
    pub cache_hits: u32,
    pub artifact_hashes: BTreeMap<String, String>,
    pub ok: bool,
}

pub fn append_manifest(manifest: &RunManifest) -> Result<(), IoError> {
    let dir = cache_dir();
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("manifest.jsonl");
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    let line = serde_json::to_string(manifest)?;
    writeln!(f, "{}", line)?;
    Ok(())
}
