//! Content-addressed artifact cache and the per-directory lock.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

pub const CACHE_ENV: &str = "OPUC_CACHE_DIR";
pub const LOCK_NAME: &str = ".opuc.lock";

/// Version string folded into every key, so a new build never reads stale
/// entries.
pub fn code_version() -> String {
    format!("opuc-core {} / opuc-cli {}", opuc_core::VERSION, env!("CARGO_PKG_VERSION"))
}

/// Keys of a `serde_json::Value` object are kept sorted, so this is a
/// canonical rendering.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    serde_json::to_value(value).expect("serializable").to_string()
}

/// SHA-256 of `{artifact, code_version, params}` in canonical form.
pub fn cache_key<T: Serialize>(artifact: &str, params: &T) -> String {
    let doc = serde_json::json!({
        "artifact": artifact,
        "code_version": code_version(),
        "params": serde_json::to_value(params).expect("serializable"),
    });
    hex::encode(Sha256::digest(canonical_json(&doc).as_bytes()))
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    /// `$OPUC_CACHE_DIR` if set, else `<out_dir>/cache`.
    pub fn locate(out_dir: &Path) -> Self {
        let dir = std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| out_dir.join("cache"));
        Cache { dir }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put<T: Serialize>(&self, key: &str, value: &T) -> Result<(), CliError> {
        fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        let text = serde_json::to_string(value).expect("serializable");
        write_atomic(&self.path(key), text.as_bytes())
    }
}

/// Writes through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(&tmp, e))?;
    f.sync_all().map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// Held for the lifetime of one command; the file is removed on drop.
#[derive(Debug)]
pub struct DirLock {
    path: PathBuf,
}

impl DirLock {
    pub fn acquire(out_dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
        let path = out_dir.join(LOCK_NAME);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(DirLock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(CliError::Locked(path)),
            Err(e) => Err(CliError::io(&path, e)),
        }
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}
