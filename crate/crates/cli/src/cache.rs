//! On-disk cache of `Q_p` enumerations, one JSON file per polynomial under
//! `<root>/v<version>/<sha256 of the canonical polynomial>.json`.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use g2theta::algebra::MonicCubic;
use g2theta::qp::{self, QpResult};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const ENV_VAR: &str = "G2THETA_CACHE";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize, Deserialize)]
pub struct CacheEntry {
    pub polynomial_hash: String,
    pub version: String,
    pub timestamp: u64,
    pub result: QpResult,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
}

pub fn polynomial_hash(p: &MonicCubic) -> String {
    hex::encode(Sha256::digest(p.to_string().as_bytes()))
}

impl Cache {
    /// Flag, then environment variable, then the platform cache directory.
    /// `None` from all three disables caching.
    pub fn resolve(flag: Option<PathBuf>, disabled: bool) -> Self {
        if disabled {
            return Cache { dir: None };
        }
        let root = flag
            .or_else(|| std::env::var_os(ENV_VAR).filter(|v| !v.is_empty()).map(PathBuf::from))
            .or_else(|| dirs::cache_dir().map(|d| d.join("g2theta")));
        Cache {
            dir: root.map(|r| r.join(format!("v{VERSION}"))),
        }
    }

    #[cfg(test)]
    pub fn dir(&self) -> Option<&std::path::Path> {
        self.dir.as_deref()
    }

    fn path(&self, p: &MonicCubic) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.json", polynomial_hash(p))))
    }

    /// A cached result, if present and for the same polynomial and version.
    pub fn load(&self, p: &MonicCubic) -> Option<QpResult> {
        let text = fs::read_to_string(self.path(p)?).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        (entry.version == VERSION && &entry.result.polynomial == p)
            .then_some(entry.result)
    }

    /// Write through a temporary file so readers never see a partial entry.
    pub fn store(&self, res: &QpResult) -> std::io::Result<()> {
        let (Some(dir), Some(path)) = (&self.dir, self.path(&res.polynomial)) else {
            return Ok(());
        };
        fs::create_dir_all(dir)?;
        let entry = CacheEntry {
            polynomial_hash: polynomial_hash(&res.polynomial),
            version: VERSION.into(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            result: res.clone(),
        };
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let mut f = fs::File::create(&tmp)?;
        f.write_all(serde_json::to_string(&entry)?.as_bytes())?;
        f.sync_all()?;
        fs::rename(tmp, path)
    }

    /// Cached result or a fresh enumeration with orbits, stored on success.
    pub fn compute(&self, p: &MonicCubic, jobs: Option<usize>) -> g2theta::Result<QpResult> {
        if let Some(hit) = self.load(p) {
            return Ok(hit);
        }
        let res = qp::compute(p, jobs)?;
        if let Err(e) = self.store(&res) {
            eprintln!("warning: could not write cache entry: {e}");
        }
        Ok(res)
    }
}
