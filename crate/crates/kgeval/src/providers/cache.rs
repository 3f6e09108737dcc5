//! Content-addressed on-disk response cache.
//!
//! Entries live under `{cache_dir}/{kind}/{digest}.json`, where the digest
//! covers the provider kind, the model id, and the request payload, so
//! identical requests hit the same entry and different models never
//! collide. Writes go through a temp file plus atomic rename; corrupt
//! entries are evicted and treated as misses.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Identity of one cached provider response.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey {
    kind: String,
    digest: String,
}

impl CacheKey {
    pub fn new(kind: &str, model_id: &str, payload: &[u8]) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(kind.as_bytes());
        hasher.update([0u8]);
        hasher.update(model_id.as_bytes());
        hasher.update([0u8]);
        hasher.update(payload);
        CacheKey {
            kind: kind.to_string(),
            digest: hex::encode(hasher.finalize()),
        }
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    fn relative_path(&self) -> PathBuf {
        PathBuf::from(&self.kind).join(format!("{}.json", self.digest))
    }
}

/// Directory-backed cache. Safe for concurrent readers; writers are
/// exclusive per key through the rename step.
#[derive(Debug)]
pub struct DiskCache {
    root: PathBuf,
}

impl DiskCache {
    pub fn new(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root)
            .map_err(|e| Error::Cache(format!("cannot create cache dir {}: {e}", root.display())))?;
        Ok(DiskCache {
            root: root.to_path_buf(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.root.join(key.relative_path())
    }

    /// Fetch and decode an entry. Unreadable or undecodable entries are
    /// evicted and reported as a miss.
    pub fn get<T: DeserializeOwned>(&self, key: &CacheKey) -> Option<T> {
        let path = self.path_for(key);
        let bytes = std::fs::read(&path).ok()?;
        match serde_json::from_slice(&bytes) {
            Ok(value) => Some(value),
            Err(e) => {
                log::warn!("evicting corrupt cache entry {}: {e}", path.display());
                let _ = std::fs::remove_file(&path);
                None
            }
        }
    }

    /// Store an entry, replacing any previous content for the key. The
    /// temp-file name is unique per writer so concurrent puts of the same
    /// key cannot clobber each other's staging file.
    pub fn put<T: Serialize>(&self, key: &CacheKey, value: &T) -> Result<()> {
        static WRITER_SEQ: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
        let path = self.path_for(key);
        let dir = path.parent().expect("cache paths always have a parent");
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Cache(format!("cannot create {}: {e}", dir.display())))?;
        let bytes = serde_json::to_vec(value)?;
        let seq = WRITER_SEQ.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        let tmp = dir.join(format!(
            ".{}.tmp.{}.{seq}",
            key.digest(),
            std::process::id()
        ));
        std::fs::write(&tmp, &bytes)
            .map_err(|e| Error::Cache(format!("cannot write {}: {e}", tmp.display())))?;
        std::fs::rename(&tmp, &path)
            .map_err(|e| Error::Cache(format!("cannot commit {}: {e}", path.display())))?;
        Ok(())
    }
}
