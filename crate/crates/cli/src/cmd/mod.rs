pub mod eval;
pub mod gen_data;
pub mod grid;
pub mod speed_limit;
pub mod train;
pub mod verify;

use std::path::Path;

use anyhow::Result;
use vdl_core::vehicle::VehicleParams;
use vdl_core::{Error, Exec};

use crate::resolve::Resolved;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_DIVERGENCE: u8 = 3;
pub const EXIT_IO: u8 = 4;

pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Config(_) | Error::Shape(_) | Error::Format(_) => EXIT_CONFIG,
                Error::Io { .. } => EXIT_IO,
                Error::Divergence(_) => EXIT_DIVERGENCE,
                _ => EXIT_FAILURE,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_IO;
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return EXIT_CONFIG;
        }
    }
    EXIT_FAILURE
}

/// `None` lets rayon size the pool; 1 forces the sequential path.
pub fn exec_for(workers: Option<usize>) -> Exec {
    workers.map_or(Exec::Auto, Exec::with_workers)
}

pub fn vehicle_params(cfg: &Resolved) -> Result<VehicleParams> {
    Ok(match cfg.path("params") {
        Some(p) => VehicleParams::load(&p)?,
        None => VehicleParams::default(),
    })
}

pub fn stem(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("out")
        .to_string()
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_kinds_map_to_codes() {
        let cases = [
            (Error::Config("x".into()), EXIT_CONFIG),
            (Error::Shape("x".into()), EXIT_CONFIG),
            (Error::Format("x".into()), EXIT_CONFIG),
            (Error::Divergence("x".into()), EXIT_DIVERGENCE),
            (
                Error::io("/nowhere", std::io::Error::other("boom")),
                EXIT_IO,
            ),
        ];
        for (e, code) in cases {
            let wrapped = anyhow::Error::new(e).context("while testing");
            assert_eq!(exit_code(&wrapped), code);
        }
        assert_eq!(exit_code(&anyhow::anyhow!("plain")), EXIT_FAILURE);
    }

    #[test]
    fn stems() {
        assert_eq!(stem(Path::new("d.vdl")), "d");
    }
}
