use std::fmt::Write;
use std::path::PathBuf;

use anyhow::Result;
use vdl_core::nn::{full_grid, grid_search, Normalization};
use vdl_core::Error;

use super::train::{architecture, load_dataset, sample_sets, train_config};
use super::{exec_for, stem, vehicle_params, EXIT_OK};
use crate::manifest::{file_name, parent_dir, Kind, ManifestBuilder};
use crate::resolve::Resolved;

const DEFAULTS: &[(&str, &str)] = &[
    ("model", "mlp"),
    ("data", "dataset.vdl"),
    ("epochs", "200"),
    ("batch_size", "32"),
    ("seed", ""),
    ("out", "grid.csv"),
    ("candidates", ""),
    ("limit", ""),
    ("max_train", ""),
    ("max_test", ""),
    ("params", ""),
    ("lr", "0.001"),
    ("gamma", "0.99"),
    ("gamma_reg", "0.00001"),
];

#[derive(clap::Args)]
pub struct Args {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Candidates as `32x64x128,64x64`; defaults to the full 3^5 grid.
    #[arg(long)]
    candidates: Option<String>,
    /// Keep only the first N candidates.
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long)]
    max_train: Option<usize>,
    #[arg(long)]
    max_test: Option<usize>,
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    gamma_reg: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
}

fn parse_candidates(raw: &str) -> Result<Vec<Vec<usize>>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|c| {
            c.split('x')
                .map(|w| {
                    w.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Config(format!("candidate {c:?}: {e}")).into())
                })
                .collect()
        })
        .collect()
}

fn hidden_label(h: &[usize]) -> String {
    h.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
}

pub fn run(a: Args) -> Result<u8> {
    let mut cfg = Resolved::new(DEFAULTS, a.config.as_deref())?;
    cfg.flag("model", a.model.as_deref());
    cfg.flag("data", a.data.as_ref().map(|p| p.display()));
    cfg.flag("epochs", a.epochs);
    cfg.flag("batch_size", a.batch_size);
    cfg.flag("seed", a.seed);
    cfg.flag("out", a.out.as_ref().map(|p| p.display()));
    cfg.flag("candidates", a.candidates.as_deref());
    cfg.flag("limit", a.limit);
    cfg.flag("max_train", a.max_train);
    cfg.flag("max_test", a.max_test);
    cfg.flag("params", a.params.as_ref().map(|p| p.display()));
    cfg.flag("lr", a.lr);
    cfg.flag("gamma", a.gamma);
    cfg.flag("gamma_reg", a.gamma_reg);

    let seed: u64 = cfg.required("seed")?;
    let model: String = cfg.get("model")?;
    let mut candidates = parse_candidates(cfg.raw("candidates"))?;
    if candidates.is_empty() {
        candidates = full_grid();
    }
    if let Some(limit) = cfg.optional::<usize>("limit")? {
        candidates.truncate(limit);
    }
    if candidates.is_empty() {
        return Err(Error::Config("no grid candidates".into()).into());
    }
    for c in &candidates {
        architecture(&model, Some(c.clone()))?;
    }
    let tcfg = train_config(&cfg, seed)?;
    let out = cfg.path("out").unwrap_or_else(|| PathBuf::from("grid.csv"));
    let data = cfg.path("data").ok_or_else(|| Error::Config("data must be given".into()))?;
    let params = vehicle_params(&cfg)?;
    let (ds, _) = load_dataset(&data, &params)?;
    let norm = Normalization::for_params(&params);
    let (train_set, test_set) = sample_sets(&ds, &norm, cfg.optional("max_train")?, cfg.optional("max_test")?);

    let exec = exec_for(a.workers);
    let results = exec.install(|| {
        grid_search(
            &candidates,
            |h| architecture(&model, Some(h)).expect("validated above"),
            &norm.output_scale(),
            &train_set,
            &test_set,
            &tcfg,
            exec,
        )
    })?;

    let mut csv = String::from("rank,hidden,final_test_loss,best_test_loss\n");
    for (i, r) in results.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{},{},{:?},{:?}",
            i + 1,
            hidden_label(&r.hidden),
            r.final_test_loss,
            r.best_test_loss
        );
    }
    let dir = parent_dir(&out);
    super::ensure_dir(&dir)?;
    let name = stem(&out);
    let mut m = ManifestBuilder::new(&dir, "grid-search", Some(seed), cfg.hash());
    m.write(&format!("{name}.config"), Kind::Config, cfg.render().as_bytes())?;
    m.write(&file_name(&out)?, Kind::Csv, csv.as_bytes())?;
    m.finish(&name)?;

    for r in results.iter().take(5) {
        println!("{:>20}  final {:.6}  best {:.6}", hidden_label(&r.hidden), r.final_test_loss, r.best_test_loss);
    }
    println!("wrote {} ({} candidates)", out.display(), results.len());
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidate_syntax() {
        assert_eq!(parse_candidates("32x64, 128").unwrap(), vec![vec![32, 64], vec![128]]);
        assert!(parse_candidates("").unwrap().is_empty());
        assert!(parse_candidates("32xx").is_err());
        assert_eq!(hidden_label(&[32, 128]), "32x128");
    }
}
