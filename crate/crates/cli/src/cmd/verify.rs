use std::path::PathBuf;

use anyhow::Result;
use vdl_core::Error;

use super::{EXIT_FAILURE, EXIT_OK};
use crate::manifest;

#[derive(clap::Args)]
pub struct Args {
    /// Manifest files, or directories holding `*.manifest.json`.
    #[arg(required = true)]
    paths: Vec<PathBuf>,
}

pub fn run(a: Args) -> Result<u8> {
    let manifests = manifest::collect(&a.paths)?;
    if manifests.is_empty() {
        return Err(Error::Config("no manifests found".into()).into());
    }
    let mut failed = 0;
    for m in &manifests {
        let problems = manifest::verify(m)?;
        if problems.is_empty() {
            println!("ok      {}", m.display());
        } else {
            failed += 1;
            println!("FAILED  {}", m.display());
            for p in problems {
                println!("        {p}");
            }
        }
    }
    println!("{} of {} manifests verified", manifests.len() - failed, manifests.len());
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}
