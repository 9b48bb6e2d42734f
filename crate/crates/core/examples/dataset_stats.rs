use std::time::Instant;

use vdl_core::dataset::{generate_dataset, GenConfig};
use vdl_core::vehicle::VehicleParams;
use vdl_core::Exec;

fn main() {
    let n: usize = std::env::args().nth(1).map_or(1000, |s| s.parse().unwrap());
    let p = VehicleParams::default();
    let t = Instant::now();
    let ds = generate_dataset(&GenConfig::new(n, 7), &p, Exec::Auto).unwrap();
    println!("n={n} in {:.1}s, rejections {}", t.elapsed().as_secs_f64(), ds.rejections);
    let accel = ds.instances.iter().filter(|i| i.u.torques[2] == 0.0).count();
    println!("accel fraction {:.3}", accel as f64 / n as f64);
    let mut maxd = 0.0f64;
    for i in &ds.instances {
        let (x, y) = i.trajectory[300];
        maxd = maxd.max(x.hypot(y));
    }
    println!("max displacement {maxd:.1}");
    for i in ds.instances.iter().take(8) {
        let (x, y) = i.trajectory[300];
        println!("vx0 {:.1} vy0 {:.2} u {:?} end ({x:.1},{y:.1})", i.xi0.vx, i.xi0.vy, i.u);
    }
}
