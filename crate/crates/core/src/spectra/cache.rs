//! Binary spectrum cache: one file per (domain, count), self-describing
//! header plus little-endian f64 payload. Purely an optimization; reloads
//! are bit-identical to the computed spectra.

use super::{DomainSpec, EigenPair, Grid, ScalarField};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

const MAGIC: &[u8; 8] = b"NLSPEC01";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    version: u32,
    domain: DomainSpec,
    h: f64,
    count: usize,
    n_points: usize,
    payload_sha256: String,
}

/// Stable key: SHA-256 of the canonical domain serialization plus count.
pub fn cache_key(domain: &DomainSpec, count: usize) -> String {
    let canonical = serde_json::to_string(domain).expect("domain serializes");
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    hasher.update(count.to_le_bytes());
    let digest = hasher.finalize();
    let mut out = String::with_capacity(32);
    for b in digest.iter().take(16) {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

fn cache_path(dir: &Path, domain: &DomainSpec, count: usize) -> PathBuf {
    dir.join(format!("spectrum-{}.bin", cache_key(domain, count)))
}

fn payload_bytes(pairs: &[EigenPair]) -> Vec<u8> {
    let n_points = pairs.first().map_or(0, |p| p.field.values().len());
    let mut buf = Vec::with_capacity(pairs.len() * (2 + n_points) * 8);
    for p in pairs {
        buf.extend_from_slice(&p.lambda.to_le_bytes());
        buf.extend_from_slice(&p.norm_l2.to_le_bytes());
        for v in p.field.values() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    buf
}

fn sha_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Write a computed spectrum to the cache directory.
pub fn save_spectrum(dir: &Path, domain: &DomainSpec, pairs: &[EigenPair]) -> Result<PathBuf> {
    if pairs.is_empty() {
        return Err(Error::domain("save_spectrum", "empty spectrum"));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::Cache(format!("create {dir:?}: {e}")))?;
    let payload = payload_bytes(pairs);
    let header = Header {
        version: FORMAT_VERSION,
        domain: domain.clone(),
        h: pairs[0].field.grid().spacing(),
        count: pairs.len(),
        n_points: pairs[0].field.values().len(),
        payload_sha256: sha_hex(&payload),
    };
    let header_json =
        serde_json::to_vec(&header).map_err(|e| Error::Cache(format!("header encode: {e}")))?;

    let path = cache_path(dir, domain, pairs.len());
    let mut file =
        std::fs::File::create(&path).map_err(|e| Error::Cache(format!("create {path:?}: {e}")))?;
    let write = |f: &mut std::fs::File, b: &[u8]| -> Result<()> {
        f.write_all(b)
            .map_err(|e| Error::Cache(format!("write {path:?}: {e}")))
    };
    write(&mut file, MAGIC)?;
    write(&mut file, &(header_json.len() as u32).to_le_bytes())?;
    write(&mut file, &header_json)?;
    write(&mut file, &payload)?;
    Ok(path)
}

/// Load a cached spectrum; `Ok(None)` when absent, `Err(Cache)` when the
/// file exists but fails validation (caller should recompute).
pub fn load_spectrum(
    dir: &Path,
    domain: &DomainSpec,
    count: usize,
) -> Result<Option<Vec<EigenPair>>> {
    let path = cache_path(dir, domain, count);
    let mut file = match std::fs::File::open(&path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(Error::Cache(format!("open {path:?}: {e}"))),
    };
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes)
        .map_err(|e| Error::Cache(format!("read {path:?}: {e}")))?;
    if bytes.len() < 12 || &bytes[..8] != MAGIC {
        return Err(Error::Cache(format!("{path:?}: bad magic")));
    }
    let hlen = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    if bytes.len() < 12 + hlen {
        return Err(Error::Cache(format!("{path:?}: truncated header")));
    }
    let header: Header = serde_json::from_slice(&bytes[12..12 + hlen])
        .map_err(|e| Error::Cache(format!("{path:?}: header decode: {e}")))?;
    if header.version != FORMAT_VERSION {
        return Err(Error::Cache(format!(
            "{path:?}: format version {} != {FORMAT_VERSION}",
            header.version
        )));
    }
    if &header.domain != domain || header.count != count {
        return Err(Error::Cache(format!("{path:?}: key collision")));
    }
    let payload = &bytes[12 + hlen..];
    if sha_hex(payload) != header.payload_sha256 {
        return Err(Error::Cache(format!("{path:?}: payload checksum mismatch")));
    }
    let per_pair = (2 + header.n_points) * 8;
    if payload.len() != per_pair * header.count {
        return Err(Error::Cache(format!("{path:?}: payload length mismatch")));
    }

    let grid = Grid::build(domain)?;
    if grid.len() != header.n_points {
        return Err(Error::Cache(format!(
            "{path:?}: grid has {} points, header says {}",
            grid.len(),
            header.n_points
        )));
    }
    let mut pairs = Vec::with_capacity(header.count);
    for k in 0..header.count {
        let base = k * per_pair;
        let f64_at = |off: usize| -> f64 {
            f64::from_le_bytes(payload[base + off * 8..base + off * 8 + 8].try_into().unwrap())
        };
        let lambda = f64_at(0);
        let norm_l2 = f64_at(1);
        let values: Vec<f64> = (0..header.n_points).map(|i| f64_at(2 + i)).collect();
        pairs.push(EigenPair {
            lambda,
            index: k + 1,
            field: ScalarField::new(Arc::clone(&grid), values)?,
            norm_l2,
        });
    }
    Ok(Some(pairs))
}
