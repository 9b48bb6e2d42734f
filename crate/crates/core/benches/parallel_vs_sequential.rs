use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use vdl_core::dataset::{generate_dataset, GenConfig};
use vdl_core::nn::{batch_gradient, init_model, Architecture, CnnSpec, LossConfig, Normalization, SampleSet};
use vdl_core::vehicle::VehicleParams;
use vdl_core::Exec;

fn modes() -> [(&'static str, Exec); 2] {
    [("sequential", Exec::Sequential), ("parallel", Exec::Auto)]
}

fn dataset_generation(c: &mut Criterion) {
    let params = VehicleParams::default();
    let cfg = GenConfig::new(16, 3);
    let mut group = c.benchmark_group("generate_16_instances");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| generate_dataset(&cfg, &params, exec).unwrap())
        });
    }
    group.finish();
}

fn gradient(c: &mut Criterion) {
    let params = VehicleParams::default();
    let ds = generate_dataset(&GenConfig::new(64, 5), &params, Exec::Auto).unwrap();
    let norm = Normalization::for_params(&params);
    let set = SampleSet::from_instances(&norm, &ds.instances);
    let model = init_model(Architecture::Cnn(CnnSpec::paper_default()), 1);
    let idx: Vec<usize> = (0..set.len()).collect();
    let loss = LossConfig::default();
    let scale = norm.output_scale();
    let mut group = c.benchmark_group("cnn_gradient_64_samples");
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| batch_gradient(&model, &scale, &set, &idx, &loss, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, dataset_generation, gradient);
criterion_main!(benches);
