//! Run configuration: built-in defaults, then a key=value file, then flags.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use vdl_core::fsutil;
use vdl_core::kvconfig::KvFile;
use vdl_core::Error;

pub struct Resolved {
    kv: KvFile,
    known: Vec<&'static str>,
}

impl Resolved {
    pub fn new(defaults: &[(&'static str, &str)], file: Option<&Path>) -> Result<Self> {
        let known: Vec<&'static str> = defaults.iter().map(|d| d.0).collect();
        let mut kv = KvFile::default();
        for (k, v) in defaults {
            kv.set(k, *v);
        }
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let overlay = KvFile::parse(&text).with_context(|| format!("reading {}", path.display()))?;
            overlay
                .reject_unknown(&known)
                .with_context(|| format!("in {}", path.display()))?;
            for (k, v) in overlay.iter() {
                kv.set(k, v);
            }
        }
        Ok(Self { kv, known })
    }

    pub fn flag<T: Display>(&mut self, key: &'static str, value: Option<T>) {
        debug_assert!(self.known.contains(&key), "undeclared key {key}");
        if let Some(v) = value {
            self.kv.set(key, v.to_string());
        }
    }

    pub fn switch(&mut self, key: &'static str, on: bool) {
        if on {
            self.kv.set(key, "true");
        }
    }

    pub fn raw(&self, key: &str) -> &str {
        self.kv.get(key).unwrap_or("")
    }

    pub fn get<T>(&self, key: &str) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        let raw = self.raw(key);
        raw.parse::<T>()
            .map_err(|e| Error::Config(format!("{key} = {raw:?}: {e}")).into())
    }

    pub fn optional<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if self.raw(key).is_empty() {
            Ok(None)
        } else {
            self.get(key).map(Some)
        }
    }

    pub fn required<T>(&self, key: &str) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.optional(key)?
            .ok_or_else(|| Error::Config(format!("{key} must be given (flag --{} or config file)", key.replace('_', "-"))).into())
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        let raw = self.raw(key);
        (!raw.is_empty()).then(|| PathBuf::from(raw))
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        match self.raw(key) {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" | "" => Ok(false),
            other => Err(Error::Config(format!("{key} = {other:?} is not a boolean")).into()),
        }
    }

    pub fn render(&self) -> String {
        self.kv.render()
    }

    pub fn hash(&self) -> String {
        fsutil::sha256_hex(self.render().as_bytes())
    }
}

/// Comma-separated list, empty entries dropped.
pub fn list<T>(raw: &str, key: &str) -> Result<Vec<T>>
where
    T: FromStr,
    T::Err: Display,
{
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| Error::Config(format!("{key}: {s:?}: {e}")).into())
        })
        .collect()
}
