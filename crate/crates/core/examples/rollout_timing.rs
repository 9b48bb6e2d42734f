use std::time::Instant;

use vdl_core::vehicle::{simulate_rollout, ControlInput, VehicleParams, VehicleState};

fn main() {
    let p = VehicleParams::default();
    let s = VehicleState {
        vx: 20.0,
        omega: [20.0 / p.r_eff; 4],
        ..Default::default()
    };
    let u = ControlInput::new([300.0, 300.0, 0.0, 0.0], 0.2);
    let t = Instant::now();
    let n = 50;
    for _ in 0..n {
        std::hint::black_box(simulate_rollout(&s, &u, 3.0, 0.01, &p).unwrap());
    }
    println!("{:.3} ms per 3 s rollout", t.elapsed().as_secs_f64() * 1e3 / n as f64);
}
