//! Content-addressed result cache.
//!
//! Keys are SHA-256 over the canonicalized input document plus a command
//! descriptor; values are the exact output bytes. Writes go through a
//! temp-file-then-rename so concurrent runs never observe partial entries.
//! The cache is purely an optimization: cold and warm runs produce
//! byte-identical output.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

pub const CACHE_DIR_ENV: &str = "SYZMIRROR_CACHE_DIR";

#[derive(Debug, Clone)]
pub struct ResultCache {
    dir: PathBuf,
}

impl ResultCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ResultCache { dir: dir.into() }
    }

    /// Directory from `SYZMIRROR_CACHE_DIR`, else a per-user temp location.
    pub fn from_env() -> Self {
        let dir = std::env::var_os(CACHE_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| std::env::temp_dir().join("syzmirror-cache"));
        ResultCache::new(dir)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(canonical_input: &[u8], descriptor: &str) -> String {
        let mut h = Sha256::new();
        h.update(canonical_input);
        h.update([0u8]);
        h.update(descriptor.as_bytes());
        format!("{:x}", h.finalize())
    }

    fn path_for(&self, key: &str, ext: &str) -> PathBuf {
        self.dir.join(format!("{key}.{ext}"))
    }

    pub fn get(&self, key: &str, ext: &str) -> Option<Vec<u8>> {
        fs::read(self.path_for(key, ext)).ok()
    }

    pub fn put(&self, key: &str, ext: &str, bytes: &[u8]) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let target = self.path_for(key, ext);
        let tmp = self
            .dir
            .join(format!("{key}.{ext}.tmp-{}", std::process::id()));
        fs::write(&tmp, bytes)?;
        fs::rename(&tmp, &target)
    }
}
