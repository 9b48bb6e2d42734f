use proptest::prelude::*;
use vdl_core::dataset::{
    decode, encode, generate_dataset, generate_instance, instance_branch, Branch, GenConfig, SAMPLES,
};
use vdl_core::vehicle::{simulate_rollout, VehicleParams};
use vdl_core::Exec;

#[test]
fn bytes_do_not_depend_on_worker_count() {
    let p = VehicleParams::default();
    let cfg = GenConfig::new(10, 1);
    let reference = encode(&generate_dataset(&cfg, &p, Exec::Sequential).unwrap());
    for workers in [1, 4, 8] {
        let ds = generate_dataset(&cfg, &p, Exec::with_workers(workers)).unwrap();
        assert_eq!(encode(&ds), reference, "workers = {workers}");
    }
    assert_eq!(encode(&decode(&reference).unwrap()), reference);
}

#[test]
fn instances_replay_from_their_initial_state_and_control() {
    let p = VehicleParams::default();
    let ds = generate_dataset(&GenConfig::new(5, 11), &p, Exec::Auto).unwrap();
    for inst in &ds.instances {
        let r = simulate_rollout(&inst.xi0, &inst.u, ds.horizon, ds.sample_dt, &p).unwrap();
        assert_eq!(r.positions(), inst.trajectory);
        assert_eq!(inst.trajectory.len(), SAMPLES);
    }
}

#[test]
fn generated_branches_are_balanced() {
    let n = 2000u64;
    let accelerating = (0..n)
        .filter(|&i| instance_branch(42, i) == Branch::Accelerate)
        .count() as f64;
    let frac = accelerating / n as f64;
    assert!((frac - 0.5).abs() < 0.03, "fraction {frac}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn controls_respect_their_branch(seed in any::<u64>(), index in 0u64..1_000_000) {
        let p = VehicleParams::default();
        let cfg = GenConfig::new(1, seed);
        let g = generate_instance(&cfg, index, &p).unwrap();
        let u = g.instance.u;
        prop_assert_eq!(g.branch, instance_branch(seed, index));
        prop_assert!(u.delta.abs() <= 0.5);
        match g.branch {
            Branch::Accelerate => {
                prop_assert!(u.torques[0] >= 0.0 && u.torques[0] <= 750.0);
                prop_assert_eq!(u.torques[0], u.torques[1]);
                prop_assert_eq!(u.torques[2], 0.0);
            }
            Branch::Decelerate => {
                prop_assert!((-1250.0..=0.0).contains(&u.torques[0]));
                prop_assert!(u.torques.iter().all(|&t| t == u.torques[0]));
            }
        }
        prop_assert!(g.instance.xi0.vx >= 5.0 && g.instance.xi0.vx <= 40.0);
    }
}
