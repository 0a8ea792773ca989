//! Append-only on-disk cache of Frobenius cycle types.
//!
//! One record per line: `<curve-hash> <prime> <len> <len> ...`. A torn or
//! malformed tail (from an interrupted write) is dropped on load and the
//! file is truncated back to the last good record.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use crate::error::{Error, Result};

/// One parsed cache line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheRecord {
    pub curve_hash: String,
    pub prime: u64,
    pub lengths: Vec<usize>,
}

/// Parses one record; `None` for anything malformed.
pub fn parse_record(line: &str) -> Option<CacheRecord> {
    let mut it = line.split_ascii_whitespace();
    let curve_hash = it.next()?;
    if curve_hash.len() != 16 || !curve_hash.bytes().all(|b| b.is_ascii_hexdigit()) {
        return None;
    }
    let prime: u64 = it.next()?.parse().ok()?;
    let lengths = it.map(|t| t.parse::<usize>().ok().filter(|&l| l > 0)).collect::<Option<Vec<_>>>()?;
    if lengths.is_empty() {
        return None;
    }
    Some(CacheRecord {
        curve_hash: curve_hash.to_string(),
        prime,
        lengths,
    })
}

/// Parses a whole cache image, returning the records and the byte length of
/// the valid prefix.
pub fn parse_cache(bytes: &[u8]) -> (Vec<CacheRecord>, usize) {
    let mut records = Vec::new();
    let mut good = 0;
    let mut pos = 0;
    while pos < bytes.len() {
        let Some(nl) = bytes[pos..].iter().position(|&b| b == b'\n') else {
            break;
        };
        let Ok(line) = std::str::from_utf8(&bytes[pos..pos + nl]) else {
            break;
        };
        let Some(rec) = parse_record(line) else {
            break;
        };
        records.push(rec);
        pos += nl + 1;
        good = pos;
    }
    (records, good)
}

type Key = (String, u64);

pub struct PrimeCache {
    path: PathBuf,
    entries: RwLock<HashMap<Key, Vec<usize>>>,
    file: Mutex<File>,
}

impl std::fmt::Debug for PrimeCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrimeCache").field("path", &self.path).finish()
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::invalid(format!("cache {}: {e}", path.display()))
}

impl PrimeCache {
    /// Opens or creates the cache file, discarding any corrupt tail.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut file = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(false)
            .open(&path)
            .map_err(|e| io_err(&path, e))?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes).map_err(|e| io_err(&path, e))?;
        let (records, good) = parse_cache(&bytes);
        if good < bytes.len() {
            file.set_len(good as u64).map_err(|e| io_err(&path, e))?;
        }
        file.seek(SeekFrom::End(0)).map_err(|e| io_err(&path, e))?;
        let entries = records
            .into_iter()
            .map(|r| ((r.curve_hash, r.prime), r.lengths))
            .collect();
        Ok(PrimeCache {
            path,
            entries: RwLock::new(entries),
            file: Mutex::new(file),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, curve_hash: &str, prime: u64) -> Option<Vec<usize>> {
        self.entries
            .read()
            .expect("cache lock")
            .get(&(curve_hash.to_string(), prime))
            .cloned()
    }

    /// Records a cycle type; a no-op if already present.
    pub fn insert(&self, curve_hash: &str, prime: u64, lengths: &[usize]) -> Result<()> {
        let key = (curve_hash.to_string(), prime);
        if self.entries.read().expect("cache lock").contains_key(&key) {
            return Ok(());
        }
        let mut file = self.file.lock().expect("cache file lock");
        let mut entries = self.entries.write().expect("cache lock");
        if entries.contains_key(&key) {
            return Ok(());
        }
        let mut line = format!("{curve_hash} {prime}");
        for l in lengths {
            line.push(' ');
            line.push_str(&l.to_string());
        }
        line.push('\n');
        file.write_all(line.as_bytes()).map_err(|e| io_err(&self.path, e))?;
        entries.insert(key, lengths.to_vec());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: &str = "0123456789abcdef";

    #[test]
    fn record_parsing() {
        let r = parse_record("0123456789abcdef 433 1 1 1").unwrap();
        assert_eq!((r.prime, r.lengths), (433, vec![1, 1, 1]));
        assert!(parse_record("0123456789abcdef 433").is_none());
        assert!(parse_record("xyz 433 1").is_none());
        assert!(parse_record("0123456789abcdef 433 0").is_none());
        assert!(parse_record("0123456789abcdef 43x 1").is_none());
    }

    #[test]
    fn round_trip_and_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        {
            let c = PrimeCache::open(&path).unwrap();
            c.insert(H, 5, &[1, 2]).unwrap();
            c.insert(H, 7, &[3]).unwrap();
            c.insert(H, 7, &[3]).unwrap();
        }
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"0123456789abcdef 11 1 ").unwrap();
        drop(f);
        let c = PrimeCache::open(&path).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.get(H, 5), Some(vec![1, 2]));
        assert_eq!(c.get(H, 11), None);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "0123456789abcdef 5 1 2\n0123456789abcdef 7 3\n");
        c.insert(H, 11, &[1, 1, 1]).unwrap();
        drop(c);
        assert_eq!(PrimeCache::open(&path).unwrap().len(), 3);
    }
}
