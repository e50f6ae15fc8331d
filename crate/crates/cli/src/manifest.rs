//! Run manifests: the audit record written next to every experiment output.
//!
//! A manifest snapshots the config, the engine version, the seed, wall-time
//! bounds, and a SHA-256 digest per output file. Both the outputs and the
//! manifest are written atomically (temp file + rename in the same
//! directory), so a crashed run never leaves a manifest that lies about
//! its directory. `fixtures-check` recomputes the digests.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Args;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use loopgas_core::error::{Error, Result};

use crate::config::RunConfig;

pub const MANIFEST_NAME: &str = "manifest.json";

/// Size and digest of one emitted file, relative to the manifest's
/// directory.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// The audit record for one run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    /// Engine name and version that produced the outputs.
    pub engine: String,
    /// Root seed the run consumed (after flag overrides).
    pub seed: u64,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    /// Full config snapshot, so the run is reproducible from the manifest
    /// alone.
    pub config: RunConfig,
    pub outputs: Vec<OutputDigest>,
}

#[must_use]
pub fn engine_version() -> String {
    format!("loopgas {}", env!("CARGO_PKG_VERSION"))
}

#[must_use]
pub fn unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .expect("system clock is after the epoch")
        .as_millis() as u64
}

#[must_use]
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex::encode(hasher.finalize())
}

/// Writes `bytes` to `path` atomically: the content lands under a
/// temporary name in the same directory and is renamed into place, so
/// readers never observe a half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Digests one output by content.
#[must_use]
pub fn digest_of(name: &str, bytes: &[u8]) -> OutputDigest {
    OutputDigest {
        path: name.to_string(),
        bytes: bytes.len() as u64,
        sha256: sha256_hex(bytes),
    }
}

/// Serializes and atomically writes the manifest into `dir`.
pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<PathBuf> {
    let text = serde_json::to_string_pretty(manifest)
        .map_err(|err| Error::Serialize(err.to_string()))?;
    let path = dir.join(MANIFEST_NAME);
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Directory containing a manifest.json to verify.
    #[arg(long)]
    pub dir: PathBuf,
}

/// Recomputes every digest recorded in `dir/manifest.json` and reports a
/// line per file. Returns whether all of them verified.
pub fn check(args: &CheckArgs) -> Result<bool> {
    let path = args.dir.join(MANIFEST_NAME);
    let text = fs::read_to_string(&path)?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|err| Error::Serialize(err.to_string()))?;
    let mut all_ok = true;
    for output in &manifest.outputs {
        let file = args.dir.join(&output.path);
        let status = match fs::read(&file) {
            Err(err) if err.kind() == std::io::ErrorKind::NotFound => "MISSING".to_string(),
            Err(err) => return Err(err.into()),
            Ok(bytes) => {
                if bytes.len() as u64 == output.bytes && sha256_hex(&bytes) == output.sha256 {
                    "ok".to_string()
                } else {
                    format!(
                        "MISMATCH ({} bytes on disk vs {} recorded)",
                        bytes.len(),
                        output.bytes
                    )
                }
            }
        };
        if status != "ok" {
            all_ok = false;
        }
        println!("{}  {}", output.path, status);
    }
    println!(
        "{}: {} ({} outputs, engine {})",
        args.dir.display(),
        if all_ok { "verified" } else { "FAILED" },
        manifest.outputs.len(),
        manifest.engine
    );
    Ok(all_ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_then_read_back() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.csv");
        write_atomic(&path, b"a,b\n1,2\n").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"a,b\n1,2\n");
        assert!(
            fs::read_dir(dir.path()).unwrap().count() == 1,
            "no temp file may remain after the rename"
        );
    }

    #[test]
    fn digest_detects_a_flipped_byte() {
        let d = digest_of("x.csv", b"hello");
        assert_eq!(d.bytes, 5);
        assert_ne!(d.sha256, sha256_hex(b"hellp"));
    }
}
