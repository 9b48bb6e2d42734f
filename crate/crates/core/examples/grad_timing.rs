use std::time::Instant;

use vdl_core::nn::{batch_gradient, init_model, Architecture, CnnSpec, LossConfig, MlpSpec, SampleSet};
use vdl_core::Exec;

fn main() {
    let n = 256;
    let set = SampleSet {
        input_dim: 613,
        inputs: (0..n * 613).map(|i| ((i as f64) * 0.37).sin()).collect(),
        targets: vec![[100.0, 100.0, 0.0, 0.0, 0.1]; n],
    };
    let idx: Vec<usize> = (0..n).collect();
    let scale = [2000.0, 2000.0, 2000.0, 2000.0, 0.5];
    for arch in [
        Architecture::Mlp(MlpSpec::paper_default()),
        Architecture::Cnn(CnnSpec::paper_default()),
    ] {
        let model = init_model(arch.clone(), 1);
        let t = Instant::now();
        for b in idx.chunks(32) {
            batch_gradient(&model, &scale, &set, b, &LossConfig::default(), Exec::Sequential);
        }
        let per = t.elapsed().as_secs_f64() / n as f64;
        println!(
            "{}: {} params, {:.1} us/sample, epoch(28539) {:.1} s",
            arch.name(),
            model.num_params(),
            per * 1e6,
            per * 28539.0
        );
    }
}
