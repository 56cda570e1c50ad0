use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::warn;

use super::{config_echo, AnalysisReport};
use crate::error::{Error, Result};
use crate::flashdetect::AnalysisConfig;

/// Overrides the cache location.
pub const CACHE_DIR_ENV: &str = "FLIKCER_CACHE_DIR";

/// One `<digest>.json` report per analyzed stream.
#[derive(Debug, Clone)]
pub struct ReportCache {
    dir: PathBuf,
}

impl ReportCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// `$FLIKCER_CACHE_DIR`, else the platform cache directory plus
    /// `flashguard`.
    pub fn from_env() -> Result<Self> {
        if let Some(dir) = std::env::var_os(CACHE_DIR_ENV).filter(|d| !d.is_empty()) {
            return Ok(Self::new(dir));
        }
        let base = dirs::cache_dir().ok_or_else(|| {
            Error::InvalidConfig(format!("no platform cache directory; set {CACHE_DIR_ENV}"))
        })?;
        Ok(Self::new(base.join("flashguard")))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn entry_path(&self, digest: &str) -> Result<PathBuf> {
        if digest.len() != 64 || !digest.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(Error::InvalidConfig(format!(
                "`{digest}` is not a sha-256 hex digest"
            )));
        }
        Ok(self
            .dir
            .join(format!("{}.json", digest.to_ascii_lowercase())))
    }

    /// Writes the report through a temporary file and an atomic rename.
    pub fn store(&self, report: &AnalysisReport) -> Result<PathBuf> {
        let path = self.entry_path(&report.source_digest)?;
        fs::create_dir_all(&self.dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(&report.to_json())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
        Ok(path)
    }

    /// Reads an entry without checking its configuration.
    pub fn load(&self, digest: &str) -> Result<Option<AnalysisReport>> {
        let path = self.entry_path(digest)?;
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        AnalysisReport::from_json(&bytes)
            .map(Some)
            .map_err(|e| Error::CacheCorrupt {
                path,
                reason: e.to_string(),
            })
    }

    /// The cached report for `digest` if it was produced with `cfg`. Corrupt
    /// entries are reported as a miss.
    pub fn lookup(&self, digest: &str, cfg: &AnalysisConfig) -> Result<Option<AnalysisReport>> {
        match self.load(digest) {
            Ok(Some(r)) if r.config == config_echo(cfg) && r.source_digest == digest => Ok(Some(r)),
            Ok(_) => Ok(None),
            Err(e @ Error::CacheCorrupt { .. }) => {
                warn!("{e}; ignoring cache entry");
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }

    /// Digests of every stored entry, sorted.
    pub fn entries(&self) -> Result<Vec<String>> {
        let rd = match fs::read_dir(&self.dir) {
            Ok(rd) => rd,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let mut out = Vec::new();
        for entry in rd {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "json") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    if self.entry_path(stem).is_ok() {
                        out.push(stem.to_string());
                    }
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Removes every entry; returns how many were deleted.
    pub fn clear(&self) -> Result<usize> {
        let entries = self.entries()?;
        for d in &entries {
            fs::remove_file(self.entry_path(d)?)?;
        }
        Ok(entries.len())
    }
}
