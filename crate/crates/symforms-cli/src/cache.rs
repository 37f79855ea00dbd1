//! Content-addressed expansion cache.
//!
//! Entries are JSON files named by (name, order, format version); each
//! carries a sha256 checksum of its payload.  A checksum or parse mismatch
//! is reported on stderr and the value recomputed and rewritten.  Writes are
//! serialized through a `.lock` file so concurrent jobs do not interleave.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    format_version: u32,
    name: String,
    order: i64,
    checksum: String,
    payload: String,
}

fn checksum(payload: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(payload.as_bytes());
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn entry_path(dir: &Path, name: &str, order: i64) -> PathBuf {
    let safe: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    dir.join(format!("{safe}-{order}-v{FORMAT_VERSION}.json"))
}

struct LockGuard(PathBuf);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

fn acquire_lock(dir: &Path) -> Option<LockGuard> {
    let lock = dir.join(".lock");
    for _ in 0..100 {
        match fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&lock)
        {
            Ok(_) => return Some(LockGuard(lock)),
            Err(_) => std::thread::sleep(Duration::from_millis(10)),
        }
    }
    None // stale lock: proceed without it rather than hang
}

/// Fetch a cached payload, or compute, store and return it.
pub fn get_or_compute(
    dir: Option<&Path>,
    name: &str,
    order: i64,
    compute: impl FnOnce() -> String,
) -> String {
    let Some(dir) = dir else {
        return compute();
    };
    if let Err(e) = fs::create_dir_all(dir) {
        eprintln!("warning: cannot create cache dir {}: {e}", dir.display());
        return compute();
    }
    let path = entry_path(dir, name, order);
    if let Ok(text) = fs::read_to_string(&path) {
        match serde_json::from_str::<CacheEntry>(&text) {
            Ok(entry)
                if entry.format_version == FORMAT_VERSION
                    && entry.name == name
                    && entry.order == order
                    && checksum(&entry.payload) == entry.checksum =>
            {
                return entry.payload;
            }
            _ => {
                eprintln!(
                    "warning: cache entry {} corrupt or stale, recomputing",
                    path.display()
                );
            }
        }
    }
    let payload = compute();
    let entry = CacheEntry {
        format_version: FORMAT_VERSION,
        name: name.to_string(),
        order,
        checksum: checksum(&payload),
        payload: payload.clone(),
    };
    let _guard = acquire_lock(dir);
    let tmp = path.with_extension("json.tmp");
    let text = serde_json::to_string(&entry).expect("cache entry serializes");
    if fs::write(&tmp, text)
        .and_then(|_| fs::rename(&tmp, &path))
        .is_err()
    {
        eprintln!("warning: could not write cache entry {}", path.display());
    }
    payload
}
