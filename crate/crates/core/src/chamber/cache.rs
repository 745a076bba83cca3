//! On-disk chamber cache.
//!
//! The file is JSON carrying the schema tag, `n`, the wall list and its
//! hash, and one record per chamber. Nothing in it is trusted: on load each
//! representative is substituted back into the domain and every wall.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{
    check_n, d_set_of, generate_walls, Chamber, ChamberError, ChamberRecord, ChamberSet, Sign,
    Weight,
};
use crate::marks::MarkSet;

pub const CACHE_SCHEMA: &str = "hassett-chambers/1";

/// Environment variable naming the default cache directory.
pub const CACHE_DIR_ENV: &str = "MODULI_CACHE_DIR";

#[derive(Serialize, Deserialize)]
struct CacheFile {
    schema: String,
    n: usize,
    walls: Vec<MarkSet>,
    wall_hash: String,
    chambers: Vec<ChamberRecord>,
}

/// SHA-256 over the canonical wall listing, as lowercase hex.
pub fn wall_hash(walls: &[MarkSet]) -> String {
    let mut hasher = Sha256::new();
    for w in walls {
        hasher.update(w.to_string().as_bytes());
        hasher.update(b";");
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// `$MODULI_CACHE_DIR/chambers-n{n}.json`, if the variable is set.
pub fn default_cache_path(n: usize) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_DIR_ENV)?;
    Some(Path::new(&dir).join(format!("chambers-n{n}.json")))
}

pub fn save_cache(set: &ChamberSet, path: &Path) -> Result<(), ChamberError> {
    let walls = set.wall_subsets();
    let file = CacheFile {
        schema: CACHE_SCHEMA.to_string(),
        n: set.n,
        wall_hash: wall_hash(&walls),
        walls,
        chambers: set.chambers.iter().map(ChamberRecord::from).collect(),
    };
    let io = |source| ChamberError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    let text = serde_json::to_string(&file).map_err(|e| ChamberError::Cache {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    // Write then rename so a crash never leaves a truncated cache behind.
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, text).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

/// Loads and validates a cache for `n` markings.
///
/// Any mismatch (schema, `n`, walls, hash, ordering, or a representative
/// that fails its sign vector) is a `Cache` error; callers recompute.
pub fn load_cache(n: usize, path: &Path) -> Result<ChamberSet, ChamberError> {
    check_n(n)?;
    let stale = |reason: String| ChamberError::Cache {
        path: path.display().to_string(),
        reason,
    };
    let text = fs::read_to_string(path).map_err(|source| ChamberError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file: CacheFile =
        serde_json::from_str(&text).map_err(|e| stale(format!("unreadable: {e}")))?;
    if file.schema != CACHE_SCHEMA {
        return Err(stale(format!("schema {} != {CACHE_SCHEMA}", file.schema)));
    }
    if file.n != n {
        return Err(stale(format!("cached n = {}, requested {n}", file.n)));
    }
    let walls = generate_walls(n)?;
    let canonical: Vec<MarkSet> = walls.iter().map(|w| w.subset).collect();
    if file.walls != canonical {
        return Err(stale("wall list differs from the canonical walls".into()));
    }
    if file.wall_hash != wall_hash(&canonical) {
        return Err(stale("wall hash mismatch".into()));
    }

    let mut set = ChamberSet {
        n,
        walls,
        chambers: Vec::with_capacity(file.chambers.len()),
    };
    for (id, record) in file.chambers.into_iter().enumerate() {
        let signs = record
            .signs
            .chars()
            .map(Sign::from_char)
            .collect::<Option<Vec<_>>>()
            .filter(|s| s.len() == set.walls.len())
            .ok_or_else(|| stale(format!("chamber {id}: malformed sign vector")))?;
        if let Some(prev) = set.chambers.last() {
            if prev.signs >= signs {
                return Err(stale(format!("chamber {id}: records not strictly sorted")));
            }
        }
        let representative = Weight::new(record.representative)
            .map_err(|e| stale(format!("chamber {id}: {e}")))?;
        match set.signs_of(&representative) {
            Ok(actual) if actual == signs => {}
            _ => return Err(stale(format!("chamber {id}: representative fails its signs"))),
        }
        let d_set = d_set_of(n, &set.walls, &signs);
        if d_set != record.d_set {
            return Err(stale(format!("chamber {id}: D-set mismatch")));
        }
        set.chambers.push(Chamber {
            id,
            n,
            signs,
            representative,
            d_set,
        });
    }
    Ok(set)
}
