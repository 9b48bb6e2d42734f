//! Per-run artifact manifests and their verification.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use vdl_core::fsutil;
use vdl_core::kvconfig::KvFile;
use vdl_core::nn::Checkpoint;
use vdl_core::Error;

pub const MANIFEST_SUFFIX: &str = ".manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Dataset,
    Checkpoint,
    Config,
    Csv,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    /// Relative to the manifest's directory.
    pub file: String,
    pub kind: Kind,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub config_sha256: String,
    pub artifacts: Vec<Artifact>,
}

/// Collects artifacts written into one directory.
pub struct ManifestBuilder {
    dir: PathBuf,
    manifest: Manifest,
}

impl ManifestBuilder {
    pub fn new(dir: &Path, command: &str, seed: Option<u64>, config_sha256: String) -> Self {
        Self {
            dir: dir.to_path_buf(),
            manifest: Manifest {
                tool: "vdl".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                command: command.into(),
                seed,
                config_sha256,
                artifacts: Vec::new(),
            },
        }
    }

    /// Atomically writes `bytes` to `name` inside the run directory.
    pub fn write(&mut self, name: &str, kind: Kind, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fsutil::atomic_write(&path, bytes)?;
        self.record(name, kind, bytes);
        Ok(path)
    }

    pub fn record(&mut self, name: &str, kind: Kind, bytes: &[u8]) {
        self.manifest.artifacts.push(Artifact {
            file: name.into(),
            kind,
            sha256: fsutil::sha256_hex(bytes),
        });
    }

    pub fn finish(self, name: &str) -> Result<PathBuf> {
        let path = self.dir.join(format!("{name}{MANIFEST_SUFFIX}"));
        let mut text = serde_json::to_string_pretty(&self.manifest)?;
        text.push('\n');
        fsutil::atomic_write(&path, text.as_bytes())?;
        Ok(path)
    }
}

pub fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

pub fn file_name(path: &Path) -> Result<String> {
    path.file_name()
        .and_then(|n| n.to_str())
        .map(str::to_string)
        .ok_or_else(|| Error::Config(format!("{} is not a file path", path.display())).into())
}

/// Manifests named directly or found (non-recursively) in directories.
pub fn collect(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| Error::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.to_str().is_some_and(|s| s.ends_with(MANIFEST_SUFFIX)))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// Checks every artifact of one manifest; returns the problems found.
pub fn verify(manifest_path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest: Manifest =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", manifest_path.display()))?;
    if manifest.tool != "vdl" {
        bail!(Error::Format(format!("{} is not a vdl manifest", manifest_path.display())));
    }
    let dir = parent_dir(manifest_path);
    let mut problems = Vec::new();
    for a in &manifest.artifacts {
        let path = dir.join(&a.file);
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) => {
                problems.push(format!("{}: {e}", a.file));
                continue;
            }
        };
        let digest = fsutil::sha256_hex(&bytes);
        if digest != a.sha256 {
            problems.push(format!("{}: sha256 {digest} does not match {}", a.file, a.sha256));
            continue;
        }
        if let Err(e) = check_content(a, &path, &bytes, &manifest) {
            problems.push(format!("{}: {e:#}", a.file));
        }
    }
    Ok(problems)
}

fn check_content(a: &Artifact, path: &Path, bytes: &[u8], m: &Manifest) -> Result<()> {
    match a.kind {
        Kind::Dataset => {
            let ds = vdl_core::dataset::decode(bytes)?;
            if m.seed.is_some_and(|s| s != ds.master_seed) {
                bail!("dataset seed {} differs from the manifest", ds.master_seed);
            }
        }
        Kind::Checkpoint => {
            let text = std::str::from_utf8(bytes)?;
            let ckpt = Checkpoint::from_json(text)?;
            if ckpt.to_json()?.as_bytes() != bytes {
                bail!("checkpoint does not re-serialise to the same bytes");
            }
            if ckpt.metadata.config_hash != m.config_sha256 {
                bail!("checkpoint config hash differs from the manifest");
            }
        }
        Kind::Config => {
            let text = std::str::from_utf8(bytes)?;
            KvFile::parse(text)?;
            if fsutil::sha256_hex(bytes) != m.config_sha256 {
                bail!("config hash differs from the manifest");
            }
        }
        Kind::Csv => {
            let text = std::str::from_utf8(bytes)?;
            let mut widths = text
                .lines()
                .filter(|l| !l.starts_with('#'))
                .map(|l| l.split(',').count());
            if let Some(w) = widths.next() {
                if widths.any(|x| x != w) {
                    bail!("ragged CSV rows");
                }
            }
        }
        Kind::Svg => {
            let text = std::str::from_utf8(bytes)?;
            if !text.trim_start().starts_with("<svg") || !text.trim_end().ends_with("</svg>") {
                bail!("{} is not an SVG document", path.display());
            }
        }
    }
    Ok(())
}
