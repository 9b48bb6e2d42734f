use std::fmt::Write;
use std::path::PathBuf;

use anyhow::Result;
use vdl_core::dataset::{self, Dataset};
use vdl_core::fsutil;
use vdl_core::nn::{
    train, AdamConfig, Architecture, Checkpoint, CnnSpec, EpochRecord, LossConfig, MlpSpec, Normalization,
    SampleSet, TrainConfig, TrainingMeta,
};
use vdl_core::nn::spec::DEFAULT_HIDDEN;
use vdl_core::vehicle::VehicleParams;
use vdl_core::Error;

use super::{exec_for, stem, vehicle_params, EXIT_OK};
use crate::manifest::{file_name, parent_dir, Kind, ManifestBuilder};
use crate::resolve::{list, Resolved};
use crate::svg::{self, Plot, Series};

const DEFAULTS: &[(&str, &str)] = &[
    ("model", "cnn"),
    ("data", "dataset.vdl"),
    ("epochs", "200"),
    ("batch_size", "32"),
    ("seed", ""),
    ("out", ""),
    ("hidden", ""),
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
    /// `mlp` or `cnn`.
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
    /// Checkpoint path; defaults to `<model>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated hidden widths.
    #[arg(long)]
    hidden: Option<String>,
    /// Use only the first N training instances.
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

pub fn architecture(model: &str, hidden: Option<Vec<usize>>) -> Result<Architecture> {
    let hidden = hidden.unwrap_or_else(|| DEFAULT_HIDDEN.to_vec());
    if hidden.is_empty() || hidden.contains(&0) {
        return Err(Error::Config(format!("hidden widths must be positive, got {hidden:?}")).into());
    }
    Ok(match model {
        "mlp" => Architecture::Mlp(MlpSpec::with_hidden(hidden)),
        "cnn" => Architecture::Cnn(CnnSpec {
            hidden,
            ..CnnSpec::paper_default()
        }),
        other => return Err(Error::Config(format!("model must be mlp or cnn, got {other:?}")).into()),
    })
}

/// Dataset plus its file hash, after checking it matches the vehicle parameters.
pub fn load_dataset(path: &std::path::Path, params: &VehicleParams) -> Result<(Dataset, String)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let ds = dataset::decode(&bytes)?;
    if ds.params_hash != params.hash() {
        return Err(Error::Format(format!(
            "{} was generated with different vehicle parameters",
            path.display()
        ))
        .into());
    }
    Ok((ds, fsutil::sha256_hex(&bytes)))
}

pub fn sample_sets(
    ds: &Dataset,
    norm: &Normalization,
    max_train: Option<usize>,
    max_test: Option<usize>,
) -> (SampleSet, SampleSet) {
    let tr = ds.train();
    let te = ds.test();
    let tr = &tr[..max_train.unwrap_or(tr.len()).min(tr.len())];
    let te = &te[..max_test.unwrap_or(te.len()).min(te.len())];
    (SampleSet::from_instances(norm, tr), SampleSet::from_instances(norm, te))
}

pub fn train_config(cfg: &Resolved, seed: u64) -> Result<TrainConfig> {
    let loss = LossConfig {
        gamma: cfg.get("gamma")?,
        gamma_reg: cfg.get("gamma_reg")?,
        ..LossConfig::default()
    };
    loss.validate()?;
    let lr: f64 = cfg.get("lr")?;
    if !(lr.is_finite() && lr > 0.0) {
        return Err(Error::Config(format!("lr must be positive, got {lr}")).into());
    }
    Ok(TrainConfig {
        epochs: cfg.get("epochs")?,
        batch_size: cfg.get("batch_size")?,
        loss,
        adam: AdamConfig {
            alpha: lr,
            ..AdamConfig::default()
        },
        ..TrainConfig::new(seed)
    })
}

fn loss_csv(history: &[EpochRecord]) -> String {
    let mut out = String::from("epoch,train_loss,test_loss\n");
    for r in history.iter().filter(|r| r.epoch > 0) {
        let _ = writeln!(out, "{},{:?},{:?}", r.epoch, r.train_loss, r.test_loss);
    }
    out
}

fn loss_svg(history: &[EpochRecord], title: &str) -> String {
    let pick = |f: fn(&EpochRecord) -> f64| -> Vec<(f64, f64)> {
        history.iter().map(|r| (r.epoch as f64, f(r).log10())).collect()
    };
    let series = vec![
        Series {
            name: "train".into(),
            points: pick(|r| r.train_loss),
        },
        Series {
            name: "test".into(),
            points: pick(|r| r.test_loss),
        },
    ];
    svg::render(&Plot {
        title,
        x_label: "epoch",
        y_label: "log10 loss",
        series: &series,
        reference: None,
        labels: &[],
        equal_aspect: false,
    })
}

pub fn run(a: Args) -> Result<u8> {
    let mut cfg = Resolved::new(DEFAULTS, a.config.as_deref())?;
    cfg.flag("model", a.model.as_deref());
    cfg.flag("data", a.data.as_ref().map(|p| p.display()));
    cfg.flag("epochs", a.epochs);
    cfg.flag("batch_size", a.batch_size);
    cfg.flag("seed", a.seed);
    cfg.flag("out", a.out.as_ref().map(|p| p.display()));
    cfg.flag("hidden", a.hidden.as_deref());
    cfg.flag("max_train", a.max_train);
    cfg.flag("max_test", a.max_test);
    cfg.flag("params", a.params.as_ref().map(|p| p.display()));
    cfg.flag("lr", a.lr);
    cfg.flag("gamma", a.gamma);
    cfg.flag("gamma_reg", a.gamma_reg);

    let seed: u64 = cfg.required("seed")?;
    let model: String = cfg.get("model")?;
    let hidden = Some(list::<usize>(cfg.raw("hidden"), "hidden")?).filter(|h| !h.is_empty());
    let arch = architecture(&model, hidden)?;
    let mut tcfg = train_config(&cfg, seed)?;
    let out = cfg.path("out").unwrap_or_else(|| PathBuf::from(format!("{model}.json")));
    let data = cfg.path("data").ok_or_else(|| Error::Config("data must be given".into()))?;
    let params = vehicle_params(&cfg)?;
    let (ds, dataset_hash) = load_dataset(&data, &params)?;
    let norm = Normalization::for_params(&params);
    let (train_set, test_set) = sample_sets(&ds, &norm, cfg.optional("max_train")?, cfg.optional("max_test")?);
    log::info!(
        "{} with {} parameters on {} train / {} test samples",
        arch.name(),
        vdl_core::nn::Model::zeros(arch.clone()).num_params(),
        train_set.len(),
        test_set.len()
    );

    let exec = exec_for(a.workers);
    tcfg.exec = exec;
    let outcome = exec.install(|| train(arch, &norm.output_scale(), &train_set, &test_set, &tcfg))?;

    let meta = TrainingMeta {
        seed,
        epochs: tcfg.epochs,
        batch_size: tcfg.batch_size,
        dataset_hash,
        config_hash: cfg.hash(),
        train_count: train_set.len(),
        test_count: test_set.len(),
        history: outcome.history.clone(),
    };
    let ckpt = Checkpoint::from_outcome(&outcome, norm, tcfg.loss, meta);

    let dir = parent_dir(&out);
    super::ensure_dir(&dir)?;
    let name = stem(&out);
    let mut m = ManifestBuilder::new(&dir, "train", Some(seed), cfg.hash());
    m.write(&format!("{name}.config"), Kind::Config, cfg.render().as_bytes())?;
    m.write(&file_name(&out)?, Kind::Checkpoint, ckpt.to_json()?.as_bytes())?;
    m.write(&format!("{name}.loss.csv"), Kind::Csv, loss_csv(&outcome.history).as_bytes())?;
    let title = format!("{model} training loss");
    m.write(&format!("{name}.loss.svg"), Kind::Svg, loss_svg(&outcome.history, &title).as_bytes())?;
    m.finish(&name)?;

    println!(
        "test loss {:.6} -> {:.6} ({:.3} of initial) after {} epochs",
        outcome.initial_test_loss(),
        outcome.final_test_loss(),
        outcome.final_test_loss() / outcome.initial_test_loss(),
        tcfg.epochs
    );
    println!("wrote {}", out.display());
    Ok(EXIT_OK)
}
