//! Trains a default CNN on a freshly generated dataset and prints the loss curve.
//! Usage: desk_training [instances] [epochs] [mlp|cnn] [seed]
use std::path::PathBuf;

use vdl_core::dataset::{self, generate_dataset, GenConfig};
use vdl_core::nn::{
    train, Architecture, Checkpoint, CnnSpec, LossConfig, MlpSpec, Normalization, SampleSet, TrainConfig, TrainingMeta,
};
use vdl_core::vehicle::VehicleParams;
use vdl_core::Exec;

fn main() -> vdl_core::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).map_or(4000, |s| s.parse().unwrap());
    let epochs: usize = args.get(2).map_or(50, |s| s.parse().unwrap());
    let kind = args.get(3).map_or("cnn", |s| s.as_str());
    let seed: u64 = args.get(4).map_or(1, |s| s.parse().unwrap());
    let params = VehicleParams::default();
    let cache = PathBuf::from(format!("/tmp/vdl_{n}_{seed}.vdl"));
    let ds = if cache.exists() {
        dataset::load(&cache)?
    } else {
        let ds = generate_dataset(&GenConfig::new(n, seed), &params, Exec::Auto)?;
        dataset::save(&ds, &cache)?;
        ds
    };
    let norm = Normalization::for_params(&params);
    let tr = SampleSet::from_instances(&norm, ds.train());
    let te = SampleSet::from_instances(&norm, ds.test());
    let arch = match kind {
        "mlp" => Architecture::Mlp(MlpSpec::paper_default()),
        _ => Architecture::Cnn(CnnSpec::paper_default()),
    };
    let t = std::time::Instant::now();
    let out = train(arch, &norm.output_scale(), &tr, &te, &TrainConfig::new(seed).with_epochs(epochs))?;
    for r in &out.history {
        println!("{:4} {:.6} {:.6}", r.epoch, r.train_loss, r.test_loss);
    }
    let meta = TrainingMeta {
        seed,
        epochs,
        batch_size: 32,
        dataset_hash: String::new(),
        config_hash: String::new(),
        train_count: tr.len(),
        test_count: te.len(),
        history: out.history.clone(),
    };
    let ckpt = Checkpoint::from_outcome(&out, norm, LossConfig::default(), meta);
    ckpt.save(std::path::Path::new(&format!("/tmp/vdl_{kind}_{n}_{epochs}_{seed}.json")))?;
    println!(
        "ratio {:.3} in {:.1} s",
        out.final_test_loss() / out.initial_test_loss(),
        t.elapsed().as_secs_f64()
    );
    Ok(())
}
