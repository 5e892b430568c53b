//! On-disk spectrum cache keyed by a parameter fingerprint.
//!
//! One JSON document per fingerprint. Writers stage into a temp file in the
//! same directory and rename, so concurrent readers never observe a partial
//! document; corrupted entries are recomputed and overwritten with a warning.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use super::{fd2d, separable_spectrum, Spectrum, WireParams};
use crate::error::Result;

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Which bulk solver produces the spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BulkMethod {
    Separable { cutoff_energy: f64 },
    Fd2d { h: f64, n_lowest: usize },
}

#[derive(Serialize, Deserialize)]
struct CacheDocument {
    fingerprint: String,
    params: CacheParams,
    eigenvalues: Vec<f64>,
    source: super::SpectrumSource,
    h: Option<f64>,
    cutoff: f64,
}

#[derive(Serialize, Deserialize)]
struct CacheParams {
    wire: WireParams,
    method: BulkMethod,
}

pub struct SpectrumCache {
    dir: PathBuf,
}

impl SpectrumCache {
    pub fn new(dir: impl AsRef<Path>) -> Result<Self> {
        std::fs::create_dir_all(dir.as_ref())?;
        Ok(Self { dir: dir.as_ref().to_path_buf() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn entry_path(&self, fingerprint: &str) -> PathBuf {
        self.dir.join(format!("{fingerprint}.json"))
    }

    /// Return the cached spectrum when the fingerprint matches bit-exactly;
    /// otherwise compute, persist atomically, and return.
    pub fn fetch_or_compute(&self, wire: &WireParams, method: &BulkMethod) -> Result<Spectrum> {
        let computed_fingerprint = match method {
            BulkMethod::Separable { cutoff_energy } => {
                super::separable_fingerprint(wire, *cutoff_energy)
            }
            BulkMethod::Fd2d { h, n_lowest } => fd2d::fd2d_fingerprint(wire, *h, *n_lowest),
        };
        let path = self.entry_path(&computed_fingerprint);
        if let Some(spectrum) = self.try_read(&path, &computed_fingerprint, wire, method) {
            return Ok(spectrum);
        }

        let spectrum = match method {
            BulkMethod::Separable { cutoff_energy } => separable_spectrum(wire, *cutoff_energy)?,
            BulkMethod::Fd2d { h, n_lowest } => fd2d::fd2d_spectrum(wire, *h, *n_lowest)?,
        };
        self.write_atomic(&path, wire, method, &spectrum)?;
        Ok(spectrum)
    }

    fn try_read(
        &self,
        path: &Path,
        fingerprint: &str,
        wire: &WireParams,
        method: &BulkMethod,
    ) -> Option<Spectrum> {
        if !path.exists() {
            return None;
        }
        let parsed: std::result::Result<CacheDocument, _> = std::fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|text| serde_json::from_str(&text).map_err(|e| e.to_string()));
        match parsed {
            Ok(doc) if doc.fingerprint == fingerprint => {
                let spectrum = Spectrum {
                    eigenvalues: doc.eigenvalues,
                    source: doc.source,
                    cutoff_energy: doc.cutoff,
                    mesh_h: doc.h,
                    fingerprint: doc.fingerprint,
                };
                if spectrum.validate().is_ok() {
                    return Some(spectrum);
                }
                log::warn!(
                    "cache entry {} holds an invalid spectrum; recomputing",
                    path.display()
                );
                None
            }
            Ok(doc) => {
                log::warn!(
                    "cache entry {} fingerprint mismatch ({} != {fingerprint}); recomputing",
                    path.display(),
                    doc.fingerprint
                );
                let _ = (wire, method);
                None
            }
            Err(err) => {
                log::warn!("cache entry {} is corrupt ({err}); recomputing", path.display());
                None
            }
        }
    }

    fn write_atomic(
        &self,
        path: &Path,
        wire: &WireParams,
        method: &BulkMethod,
        spectrum: &Spectrum,
    ) -> Result<()> {
        let doc = CacheDocument {
            fingerprint: spectrum.fingerprint.clone(),
            params: CacheParams { wire: *wire, method: method.clone() },
            eigenvalues: spectrum.eigenvalues.clone(),
            source: spectrum.source,
            h: spectrum.mesh_h,
            cutoff: spectrum.cutoff_energy,
        };
        let stamp = TEMP_COUNTER.fetch_add(1, Ordering::Relaxed);
        let tmp = self.dir.join(format!(
            ".tmp-{}-{stamp}-{}",
            std::process::id(),
            spectrum.fingerprint
        ));
        std::fs::write(&tmp, serde_json::to_vec_pretty(&doc)?)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Remove all cache entries; returns how many files were deleted.
    pub fn clear(&self) -> Result<usize> {
        let mut removed = 0usize;
        for entry in std::fs::read_dir(&self.dir)? {
            let entry = entry?;
            let name = entry.file_name();
            let name = name.to_string_lossy();
            if name.ends_with(".json") || name.starts_with(".tmp-") {
                std::fs::remove_file(entry.path())?;
                removed += 1;
            }
        }
        Ok(removed)
    }
}
