//! Content cache keyed by sha256 of (schema version, stage, config subset).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use sha2::{Digest, Sha256};

use crate::Error;

/// Bumped whenever a record layout or an algorithm feeding a record changes.
pub const SCHEMA: &str = concat!("yf-", env!("CARGO_PKG_VERSION"), "-r1");

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| Error::Domain(format!("no file name in {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}-{}",
        name.to_string_lossy(),
        std::process::id(),
        TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

#[derive(Clone, Debug, Default)]
pub struct Cache {
    pub dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    pub fn key(stage: &str, subset: &serde_json::Value) -> String {
        // serde_json maps are sorted, so the rendering is canonical
        sha256_hex(format!("{}\n{}\n{}", SCHEMA, stage, subset).as_bytes())
    }

    fn path(&self, stage: &str, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}-{}.json", stage, &key[..24])))
    }

    pub fn load(&self, stage: &str, key: &str) -> Option<String> {
        fs::read_to_string(self.path(stage, key)?).ok()
    }

    pub fn store(&self, stage: &str, key: &str, content: &str) -> Result<(), Error> {
        match self.path(stage, key) {
            Some(p) => write_atomic(&p, content.as_bytes()),
            None => Ok(()),
        }
    }
}
