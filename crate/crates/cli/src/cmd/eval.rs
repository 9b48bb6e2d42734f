use std::path::{Path, PathBuf};

use anyhow::Result;
use vdl_core::baselines::{BaselineConfig, BaselineController, LateralLaw};
use vdl_core::nn::{Checkpoint, InverseModel};
use vdl_core::tracking::{
    closed_loop_simulate, ClosedLoopConfig, Controller, NnController, NnControllerConfig, ReferencePath, RunResult,
    TrackSpec,
};
use vdl_core::vehicle::VehicleParams;
use vdl_core::Error;

use super::{exec_for, vehicle_params, EXIT_DIVERGENCE, EXIT_OK};
use crate::manifest::{Kind, ManifestBuilder};
use crate::report;
use crate::resolve::{list, Resolved};

const DEFAULTS: &[(&str, &str)] = &[
    ("controllers", "cnn,mlp,pp,stanley"),
    ("cnn", ""),
    ("mlp", ""),
    ("track", ""),
    ("v_ref", ""),
    ("baselines", ""),
    ("params", ""),
    ("out_dir", "eval"),
    ("torque_limit", ""),
    ("max_duration", "180"),
];

const BASELINE_DEFAULTS: &[(&str, &str)] = &[
    ("controllers", "pp,stanley"),
    ("track", ""),
    ("v_ref", ""),
    ("baselines", ""),
    ("params", ""),
    ("out_dir", "baseline"),
    ("max_duration", "180"),
];

#[derive(clap::Args)]
pub struct Args {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Any of cnn, mlp, pp, stanley, comma-separated.
    #[arg(long)]
    controllers: Option<String>,
    /// CNN checkpoint.
    #[arg(long)]
    cnn: Option<PathBuf>,
    /// MLP checkpoint.
    #[arg(long)]
    mlp: Option<PathBuf>,
    /// Track file; the built-in default track when absent.
    #[arg(long)]
    track: Option<PathBuf>,
    /// Overrides the track's reference speed (m/s).
    #[arg(long)]
    v_ref: Option<f64>,
    /// Baseline gain file.
    #[arg(long)]
    baselines: Option<PathBuf>,
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Per-wheel torque clamp for learned controllers (N m).
    #[arg(long)]
    torque_limit: Option<f64>,
    /// Simulated seconds before a run is cut off.
    #[arg(long)]
    max_duration: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(clap::Args)]
pub struct BaselineArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// pp, stanley or both.
    #[arg(long)]
    controllers: Option<String>,
    #[arg(long)]
    track: Option<PathBuf>,
    #[arg(long)]
    v_ref: Option<f64>,
    #[arg(long)]
    baselines: Option<PathBuf>,
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    max_duration: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
}

enum Choice {
    Learned(String, InverseModel, NnControllerConfig),
    Baseline(LateralLaw, BaselineConfig),
}

impl Choice {
    fn controller(&self, params: &VehicleParams) -> Box<dyn Controller> {
        match self {
            Choice::Learned(name, model, cfg) => Box::new(NnController::new(name.clone(), model.clone(), *cfg)),
            Choice::Baseline(law, cfg) => Box::new(BaselineController::new(*law, *cfg, *params)),
        }
    }
}

fn display(p: Option<&PathBuf>) -> Option<std::path::Display<'_>> {
    p.map(|p| p.display())
}

pub fn load_track(cfg: &Resolved) -> Result<ReferencePath> {
    let path = match cfg.path("track") {
        Some(p) => ReferencePath::from_spec(&TrackSpec::load(&p)?),
        None => ReferencePath::default_track(),
    };
    Ok(match cfg.optional::<f64>("v_ref")? {
        Some(v) if v.is_finite() && v > 0.0 => path.with_v_ref(v),
        Some(v) => return Err(Error::Config(format!("v_ref must be positive, got {v}")).into()),
        None => path,
    })
}

fn load_checkpoint(cfg: &Resolved, key: &str) -> Result<InverseModel> {
    let path = cfg
        .path(key)
        .ok_or_else(|| Error::Config(format!("controller {key} needs a checkpoint (--{key})")))?;
    Ok(Checkpoint::load(&path)?.inverse_model()?)
}

fn choices(cfg: &Resolved, allowed: &[&str]) -> Result<Vec<(String, Choice)>> {
    let names: Vec<String> = list(cfg.raw("controllers"), "controllers")?;
    if names.is_empty() {
        return Err(Error::Config("no controllers requested".into()).into());
    }
    let baselines = match cfg.path("baselines") {
        Some(p) => BaselineConfig::load(&p)?,
        None => BaselineConfig::default(),
    };
    let mut nn = NnControllerConfig::default();
    if allowed.contains(&"cnn") {
        nn.torque_limit = cfg.optional("torque_limit")?;
    }
    let mut out = Vec::new();
    for (i, name) in names.iter().enumerate() {
        if names[..i].contains(name) {
            return Err(Error::Config(format!("controller {name} listed twice")).into());
        }
        if !allowed.contains(&name.as_str()) {
            return Err(Error::Config(format!("unknown controller {name:?}; expected one of {}", allowed.join(", "))).into());
        }
        let choice = match name.as_str() {
            "cnn" | "mlp" => Choice::Learned(name.clone(), load_checkpoint(cfg, name)?, nn),
            other => Choice::Baseline(other.parse::<LateralLaw>()?, baselines),
        };
        out.push((name.clone(), choice));
    }
    Ok(out)
}

fn execute(command: &str, cfg: Resolved, allowed: &[&str], workers: Option<usize>) -> Result<u8> {
    let params = vehicle_params(&cfg)?;
    let path = load_track(&cfg)?;
    let max_duration: f64 = cfg.get("max_duration")?;
    if !(max_duration.is_finite() && max_duration > 0.0) {
        return Err(Error::Config(format!("max_duration must be positive, got {max_duration}")).into());
    }
    let loop_cfg = ClosedLoopConfig {
        max_duration,
        ..ClosedLoopConfig::default()
    };
    let choices = choices(&cfg, allowed)?;
    let out_dir = cfg.path("out_dir").unwrap_or_else(|| PathBuf::from(command));

    let exec = exec_for(workers);
    let results: Vec<RunResult> = exec.install(|| {
        exec.try_map(choices.len(), |i| {
            let (name, choice) = &choices[i];
            let mut c = choice.controller(&params);
            log::info!("running {name}");
            let mut r = closed_loop_simulate(c.as_mut(), &path, &loop_cfg, &params)?;
            r.controller = name.clone();
            Ok::<_, Error>(r)
        })
    })?;

    write_outputs(command, &cfg, &out_dir, &path, &results)?;
    let mut diverged = false;
    for r in &results {
        let m = &r.metrics;
        println!(
            "{:<8} {:<9}  speed rms {:.3}  lateral rms {:.3} max {:.3}",
            r.controller,
            report::status(r),
            m.speed.rms,
            m.lateral.rms,
            m.lateral.max.abs()
        );
        if let Some(why) = &r.divergence {
            eprintln!("warning: {} diverged: {why}", r.controller);
            diverged = true;
        }
    }
    println!("wrote {}", out_dir.display());
    Ok(if diverged { EXIT_DIVERGENCE } else { EXIT_OK })
}

fn write_outputs(command: &str, cfg: &Resolved, dir: &Path, path: &ReferencePath, results: &[RunResult]) -> Result<()> {
    super::ensure_dir(dir)?;
    let comment = format!(
        "vdl {} {command}; track length {:.2} m; v_ref {} m/s; config_sha256 {}",
        env!("CARGO_PKG_VERSION"),
        path.length(),
        path.v_ref(),
        cfg.hash()
    );
    let mut m = ManifestBuilder::new(dir, command, None, cfg.hash());
    m.write(&format!("{command}.config"), Kind::Config, cfg.render().as_bytes())?;
    m.write(
        "longitudinal.csv",
        Kind::Csv,
        report::metric_table(results, &format!("speed error (m/s); {comment}"), |m| &m.speed).as_bytes(),
    )?;
    m.write(
        "lateral.csv",
        Kind::Csv,
        report::metric_table(results, &format!("lateral error (m); {comment}"), |m| &m.lateral).as_bytes(),
    )?;
    m.write("sections.csv", Kind::Csv, report::section_table(results, &comment).as_bytes())?;
    for r in results {
        m.write(&format!("trace_{}.csv", r.controller), Kind::Csv, report::trace_csv(r).as_bytes())?;
    }
    for (name, doc) in report::figures(results, path) {
        m.write(&name, Kind::Svg, doc.as_bytes())?;
    }
    m.finish(command)?;
    Ok(())
}

pub fn run(a: Args) -> Result<u8> {
    let mut cfg = Resolved::new(DEFAULTS, a.config.as_deref())?;
    cfg.flag("controllers", a.controllers.as_deref());
    cfg.flag("cnn", display(a.cnn.as_ref()));
    cfg.flag("mlp", display(a.mlp.as_ref()));
    cfg.flag("track", display(a.track.as_ref()));
    cfg.flag("v_ref", a.v_ref);
    cfg.flag("baselines", display(a.baselines.as_ref()));
    cfg.flag("params", display(a.params.as_ref()));
    cfg.flag("out_dir", display(a.out_dir.as_ref()));
    cfg.flag("torque_limit", a.torque_limit);
    cfg.flag("max_duration", a.max_duration);
    execute("eval", cfg, &["cnn", "mlp", "pp", "stanley"], a.workers)
}

pub fn run_baseline(a: BaselineArgs) -> Result<u8> {
    let mut cfg = Resolved::new(BASELINE_DEFAULTS, a.config.as_deref())?;
    cfg.flag("controllers", a.controllers.as_deref());
    cfg.flag("track", display(a.track.as_ref()));
    cfg.flag("v_ref", a.v_ref);
    cfg.flag("baselines", display(a.baselines.as_ref()));
    cfg.flag("params", display(a.params.as_ref()));
    cfg.flag("out_dir", display(a.out_dir.as_ref()));
    cfg.flag("max_duration", a.max_duration);
    execute("baseline", cfg, &["pp", "stanley"], a.workers)
}
