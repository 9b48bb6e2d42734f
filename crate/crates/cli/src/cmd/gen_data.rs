use std::path::PathBuf;

use anyhow::Result;
use vdl_core::dataset::{self, generate_dataset, GenConfig, DEFAULT_COUNT};

use super::{exec_for, stem, vehicle_params, EXIT_OK};
use crate::manifest::{file_name, parent_dir, Kind, ManifestBuilder};
use crate::resolve::Resolved;

const DEFAULTS: &[(&str, &str)] = &[
    ("n", "43241"),
    ("seed", ""),
    ("train", ""),
    ("out", "dataset.vdl"),
    ("csv", "false"),
    ("params", ""),
];

#[derive(clap::Args)]
pub struct Args {
    /// key = value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of instances.
    #[arg(long)]
    n: Option<usize>,
    /// Master seed (required here or in the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// Training instances; defaults to the 28539/43241 ratio.
    #[arg(long)]
    train: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write `<stem>.csv`.
    #[arg(long)]
    csv: bool,
    /// Vehicle parameter file.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Worker threads (1 = sequential); not part of the recorded config.
    #[arg(long)]
    workers: Option<usize>,
}

pub fn run(a: Args) -> Result<u8> {
    let mut cfg = Resolved::new(DEFAULTS, a.config.as_deref())?;
    cfg.flag("n", a.n);
    cfg.flag("seed", a.seed);
    cfg.flag("train", a.train);
    cfg.flag("out", a.out.as_ref().map(|p| p.display()));
    cfg.switch("csv", a.csv);
    cfg.flag("params", a.params.as_ref().map(|p| p.display()));

    let seed: u64 = cfg.required("seed")?;
    let n: usize = cfg.get("n")?;
    let out = cfg.path("out").unwrap_or_else(|| PathBuf::from("dataset.vdl"));
    let params = vehicle_params(&cfg)?;
    let gen = GenConfig {
        train: cfg.optional("train")?,
        ..GenConfig::new(n, seed)
    };
    gen.train_count()?;
    if n != DEFAULT_COUNT {
        log::info!("generating {n} instances (default is {DEFAULT_COUNT})");
    }

    let exec = exec_for(a.workers);
    let start = std::time::Instant::now();
    let ds = exec.install(|| generate_dataset(&gen, &params, exec))?;
    log::info!("generated in {:.1} s", start.elapsed().as_secs_f64());

    let dir = parent_dir(&out);
    super::ensure_dir(&dir)?;
    let name = stem(&out);
    let mut m = ManifestBuilder::new(&dir, "gen-data", Some(seed), cfg.hash());
    m.write(&format!("{name}.config"), Kind::Config, cfg.render().as_bytes())?;
    m.write(&file_name(&out)?, Kind::Dataset, &dataset::encode(&ds))?;
    if cfg.bool("csv")? {
        let mut buf = Vec::new();
        dataset::write_csv(&ds, &mut buf)?;
        m.write(&format!("{name}.csv"), Kind::Csv, &buf)?;
    }
    m.finish(&name)?;

    println!(
        "instances {} train {} test {} rejections {} ({:.2} per instance)",
        ds.len(),
        ds.train_len(),
        ds.test_len(),
        ds.rejections,
        ds.rejections as f64 / ds.len() as f64
    );
    println!("wrote {}", out.display());
    Ok(EXIT_OK)
}
