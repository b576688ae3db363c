//! Content-addressed cache for expensive intermediate objects.
//!
//! Entries live under `$SCALENT_CACHE_DIR` as `<kind>-<key>.json`. The first
//! line is the SHA-256 of the rest of the file; an entry whose hash does not
//! match is recomputed and rewritten with a warning.

use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const CACHE_ENV: &str = "SCALENT_CACHE_DIR";

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit,
    Miss,
    Corrupt,
}

impl Cache {
    pub fn from_env() -> Option<Cache> {
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(|d| Cache { dir: PathBuf::from(d) })
    }

    /// Key over the parts and the tool version.
    pub fn key(parts: &[&str]) -> String {
        let mut h = Sha256::new();
        h.update(env!("CARGO_PKG_VERSION").as_bytes());
        for p in parts {
            h.update([0u8]);
            h.update(p.as_bytes());
        }
        format!("{:x}", h.finalize())
    }

    fn path(&self, kind: &str, key: &str) -> PathBuf {
        self.dir.join(format!("{kind}-{key}.json"))
    }

    fn read<T: DeserializeOwned>(&self, kind: &str, key: &str) -> (Option<T>, Lookup) {
        let Ok(text) = std::fs::read_to_string(self.path(kind, key)) else {
            return (None, Lookup::Miss);
        };
        let parsed = text.split_once('\n').and_then(|(hash, body)| {
            (sha256_hex(body.as_bytes()) == hash.trim()).then(|| serde_json::from_str(body).ok()).flatten()
        });
        match parsed {
            Some(v) => (Some(v), Lookup::Hit),
            None => (None, Lookup::Corrupt),
        }
    }

    fn write<T: Serialize>(&self, kind: &str, key: &str, value: &T) -> std::io::Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let body = serde_json::to_string(value).map_err(std::io::Error::other)?;
        let path = self.path(kind, key);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        std::fs::write(&tmp, format!("{}\n{body}", sha256_hex(body.as_bytes())))?;
        std::fs::rename(tmp, path)
    }

    pub fn get_or_compute<T, E>(&self, kind: &str, key: &str, compute: impl FnOnce() -> Result<T, E>) -> Result<(T, Lookup), E>
    where
        T: Serialize + DeserializeOwned,
    {
        let (found, status) = self.read(kind, key);
        if let Some(v) = found {
            return Ok((v, status));
        }
        if status == Lookup::Corrupt {
            eprintln!("warning: corrupt cache entry {}, recomputing", self.path(kind, key).display());
        }
        let v = compute()?;
        if let Err(e) = self.write(kind, key, &v) {
            eprintln!("warning: cannot write cache entry {}: {e}", self.path(kind, key).display());
        }
        Ok((v, status))
    }
}

/// Runs `compute` through the cache when one is configured.
pub fn cached<T, E>(cache: Option<&Cache>, kind: &str, parts: &[&str], compute: impl FnOnce() -> Result<T, E>) -> Result<T, E>
where
    T: Serialize + DeserializeOwned,
{
    match cache {
        Some(c) => c.get_or_compute(kind, &Cache::key(parts), compute).map(|r| r.0),
        None => compute(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hit_miss_and_tamper() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache { dir: dir.path().to_path_buf() };
        let key = Cache::key(&["x", "1"]);
        let (v, s) = c.get_or_compute::<Vec<f64>, ()>("t", &key, || Ok(vec![0.1, 1.0 / 3.0])).unwrap();
        assert_eq!(s, Lookup::Miss);
        let (w, s) = c.get_or_compute::<Vec<f64>, ()>("t", &key, || panic!("should hit")).unwrap();
        assert_eq!((s, &w), (Lookup::Hit, &v));
        let p = c.path("t", &key);
        let text = std::fs::read_to_string(&p).unwrap().replace("0.1", "0.2");
        std::fs::write(&p, text).unwrap();
        let (u, s) = c.get_or_compute::<Vec<f64>, ()>("t", &key, || Ok(vec![0.1, 1.0 / 3.0])).unwrap();
        assert_eq!((s, u), (Lookup::Corrupt, v));
        assert_ne!(Cache::key(&["x", "1"]), Cache::key(&["x", "2"]));
    }
}
