//! Network forward passes, gradients and Adam checked against independent
//! references. Frozen reference values come from `oracles/nn_forward.py`
//! and `oracles/adam_trace.py`.

use vdl_core::nn::{
    batch_gradient, AdamConfig, AdamState, Architecture, CnnSpec, ConvStackSpec, LossConfig, MlpSpec, Model,
    SampleSet,
};
use vdl_core::rng::CounterRng;
use vdl_core::Exec;

fn formula_params(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.5 * (0.37 * i as f64 + 0.1).sin()).collect()
}

fn formula_input(n: usize) -> Vec<f64> {
    (0..n).map(|j| (0.7 * j as f64).cos() - 0.2).collect()
}

fn formula_model(arch: Architecture) -> Model {
    let n = Model::zeros(arch.clone()).num_params();
    Model::from_params(arch, formula_params(n)).unwrap()
}

fn assert_close(got: &[f64], want: &[f64], tol: f64) {
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(want) {
        let scale = w.abs().max(1.0);
        assert!((g - w).abs() <= tol * scale, "got {got:?}\nwant {want:?}");
    }
}

fn tiny_cnn() -> CnnSpec {
    CnnSpec {
        state_dim: 2,
        signal_len: 8,
        conv: ConvStackSpec {
            channels: vec![2, 1],
            kernel: 3,
            pool: 2,
        },
        hidden: vec![3],
        output_dim: 5,
    }
}

#[test]
fn mlp_forward_matches_reference() {
    let tiny = formula_model(Architecture::Mlp(MlpSpec {
        input_dim: 6,
        hidden: vec![4, 3],
        output_dim: 5,
    }));
    assert_close(
        &tiny.forward(&formula_input(6)),
        &[
            -0.09876854722527326,
            -0.274066233528276,
            -0.11516337651422984,
            0.023415637279187773,
            -0.17021769229742362,
        ],
        1e-12,
    );
    let full = formula_model(Architecture::Mlp(MlpSpec::paper_default()));
    assert_close(
        &full.forward(&formula_input(613)),
        &[
            -6.6536098398701995,
            3.897186256654827,
            -1.3165990942946468,
            -2.3765752162249005,
            4.391599993997203,
        ],
        1e-12,
    );
}

#[test]
fn cnn_forward_matches_reference() {
    let tiny = formula_model(Architecture::Cnn(tiny_cnn()));
    assert_eq!(tiny.num_params(), 71);
    assert_close(
        &tiny.forward(&formula_input(18)),
        &[
            -0.22238997013907416,
            0.018108723399997056,
            0.12127697570321863,
            0.15163806678851996,
            0.24620367004683158,
        ],
        1e-12,
    );
    let full = formula_model(Architecture::Cnn(CnnSpec::paper_default()));
    assert_close(
        &full.forward(&formula_input(613)),
        &[
            -5.4297637589225225,
            7.514603888340059,
            -7.94609859495912,
            9.613249530973215,
            -8.857084145954868,
        ],
        1e-12,
    );
}

/// Straight transcription of the bias-corrected update for one scalar.
fn scalar_adam(steps: usize, grad: impl Fn(f64) -> f64) -> Vec<f64> {
    let (alpha, b1, b2, eps) = (1e-3f64, 0.9f64, 0.999f64, 1e-8f64);
    let (mut w, mut m, mut v) = (0.0f64, 0.0f64, 0.0f64);
    let mut out = Vec::with_capacity(steps);
    for t in 1..=steps {
        let g = grad(w);
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g * g;
        let mh = m / (1.0 - b1.powi(t as i32));
        let vh = v / (1.0 - b2.powi(t as i32));
        w -= alpha * mh / (vh.sqrt() + eps);
        out.push(w);
    }
    out
}

#[test]
fn adam_quadratic_trace() {
    let oracle = scalar_adam(200, |w| w - 3.0);
    let mut state = AdamState::new(AdamConfig::default(), 1);
    let mut w = [0.0];
    let mut prev_gap = 3.0;
    for (t, expect) in oracle.iter().enumerate() {
        let g = [w[0] - 3.0];
        state.apply(&mut w, &g);
        assert!((w[0] - expect).abs() < 1e-12, "step {}: {} vs {}", t + 1, w[0], expect);
        let gap = (w[0] - 3.0).abs();
        assert!(gap < prev_gap);
        prev_gap = gap;
    }
    assert_eq!(state.step, 200);
    let frozen = [
        (1, 0.0009999999966666666),
        (2, 0.001999991289435569),
        (3, 0.00299996809351928),
        (10, 0.009998923399827784),
        (50, 0.04989945854853517),
        (100, 0.0994307137804238),
        (150, 0.1485516486339407),
        (200, 0.1972645270287461),
    ];
    for (t, v) in frozen {
        assert!((oracle[t - 1] - v).abs() < 1e-12, "step {t}");
    }
}

fn random_mlp(rng: &mut CounterRng) -> Architecture {
    let layers = 1 + rng.below(3) as usize;
    Architecture::Mlp(MlpSpec {
        input_dim: 2 + rng.below(6) as usize,
        hidden: (0..layers).map(|_| 2 + rng.below(5) as usize).collect(),
        output_dim: 5,
    })
}

fn random_cnn(rng: &mut CounterRng) -> Architecture {
    let layers = 1 + rng.below(3) as usize;
    let min_len = 1usize << layers;
    Architecture::Cnn(CnnSpec {
        state_dim: 1 + rng.below(3) as usize,
        signal_len: min_len + rng.below(12) as usize,
        conv: ConvStackSpec {
            channels: (0..layers).map(|_| 1 + rng.below(3) as usize).collect(),
            kernel: 3,
            pool: 2,
        },
        hidden: vec![2 + rng.below(4) as usize],
        output_dim: 5,
    })
}

/// Random weights with non-zero biases, and a random three-sample batch.
fn random_problem(arch: Architecture, rng: &mut CounterRng) -> (Model, SampleSet) {
    let mut model = Model::xavier(arch.clone(), rng);
    for p in model.params_mut().iter_mut() {
        if *p == 0.0 {
            *p = rng.uniform(-0.3, 0.3);
        }
    }
    let dim = arch.input_dim();
    let n = 3;
    let set = SampleSet {
        input_dim: dim,
        inputs: (0..n * dim).map(|_| rng.uniform(-1.0, 1.0)).collect(),
        targets: (0..n)
            .map(|_| {
                let mut t = [0.0; 5];
                for v in t.iter_mut().take(4) {
                    *v = rng.uniform(-1500.0, 1500.0);
                }
                t[4] = rng.uniform(-0.4, 0.4);
                t
            })
            .collect(),
    };
    (model, set)
}

const OUT_SCALE: [f64; 5] = [2000.0, 2000.0, 2000.0, 2000.0, 0.5];

/// Largest entry-wise gap between analytic and central-difference gradients,
/// relative to the largest gradient entry.
fn gradient_check(mut model: Model, set: &SampleSet) -> f64 {
    let loss = LossConfig {
        gamma_reg: 1e-3,
        ..LossConfig::default()
    };
    let idx: Vec<usize> = (0..set.len()).collect();
    let (_, grad) = batch_gradient(&model, &OUT_SCALE, set, &idx, &loss, Exec::Sequential);
    let h = 1e-5;
    let mut worst = 0.0f64;
    let scale = grad.iter().fold(0.0f64, |a, g| a.max(g.abs()));
    for i in 0..model.num_params() {
        let orig = model.params()[i];
        model.params_mut()[i] = orig + h;
        let (up, _) = batch_gradient(&model, &OUT_SCALE, set, &idx, &loss, Exec::Sequential);
        model.params_mut()[i] = orig - h;
        let (down, _) = batch_gradient(&model, &OUT_SCALE, set, &idx, &loss, Exec::Sequential);
        model.params_mut()[i] = orig;
        let fd = (up - down) / (2.0 * h);
        worst = worst.max((fd - grad[i]).abs() / scale);
    }
    worst
}

#[test]
fn mlp_gradients_match_finite_differences() {
    let mut rng = CounterRng::new(0x6d6c70);
    for case in 0..20 {
        let arch = random_mlp(&mut rng);
        let (model, set) = random_problem(arch.clone(), &mut rng);
        let err = gradient_check(model, &set);
        assert!(err < 1e-6, "case {case} {arch:?}: relative error {err:e}");
    }
}

#[test]
fn cnn_gradients_match_finite_differences() {
    let mut rng = CounterRng::new(0x636e6e);
    for case in 0..20 {
        let arch = random_cnn(&mut rng);
        let (model, set) = random_problem(arch.clone(), &mut rng);
        let err = gradient_check(model, &set);
        assert!(err < 1e-6, "case {case} {arch:?}: relative error {err:e}");
    }
}

#[test]
fn exact_fit_has_zero_gradient() {
    let arch = Architecture::Cnn(tiny_cnn());
    let model = Model::zeros(arch);
    let set = SampleSet {
        input_dim: 18,
        inputs: formula_input(36),
        targets: vec![[0.0; 5]; 2],
    };
    let loss = LossConfig {
        gamma_reg: 0.0,
        ..LossConfig::default()
    };
    let (l, grad) = batch_gradient(&model, &OUT_SCALE, &set, &[0, 1], &loss, Exec::Sequential);
    assert_eq!(l, 0.0);
    assert!(grad.iter().all(|&g| g == 0.0));
}

#[test]
fn batch_gradient_is_independent_of_workers() {
    let mut rng = CounterRng::new(44);
    let (model, _) = random_problem(random_cnn(&mut rng), &mut rng);
    let dim = model.architecture().input_dim();
    let set = SampleSet {
        input_dim: dim,
        inputs: (0..40 * dim).map(|_| rng.uniform(-1.0, 1.0)).collect(),
        targets: (0..40).map(|i| [i as f64; 5]).collect(),
    };
    let idx: Vec<usize> = (0..40).rev().collect();
    let loss = LossConfig::default();
    let (l1, g1) = batch_gradient(&model, &OUT_SCALE, &set, &idx, &loss, Exec::Sequential);
    for workers in [2, 4, 8] {
        let (l, g) = batch_gradient(&model, &OUT_SCALE, &set, &idx, &loss, Exec::with_workers(workers));
        assert_eq!(l.to_bits(), l1.to_bits());
        assert!(g.iter().zip(&g1).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}

#[test]
fn forward_is_deterministic_across_threads() {
    let model = formula_model(Architecture::Cnn(CnnSpec::paper_default()));
    let input = formula_input(613);
    let reference = model.forward(&input);
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..4).map(|_| s.spawn(|| model.forward(&input))).collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), reference);
        }
    });
}

#[test]
fn swapping_channels_changes_output_after_one_step() {
    let arch = Architecture::Cnn(tiny_cnn());
    let mut rng = CounterRng::new(9);
    let (mut model, set) = random_problem(arch, &mut rng);
    let idx = [0, 1, 2];
    let (_, grad) = batch_gradient(&model, &OUT_SCALE, &set, &idx, &LossConfig::default(), Exec::Sequential);
    let mut adam = AdamState::new(AdamConfig::default(), model.num_params());
    adam.apply(model.params_mut(), &grad);
    let x = formula_input(18);
    let mut swapped = x.clone();
    swapped[2..10].copy_from_slice(&x[10..18]);
    swapped[10..18].copy_from_slice(&x[2..10]);
    assert_ne!(model.forward(&x), model.forward(&swapped));
}
