//! Drives the default track with a saved checkpoint and prints the metrics.
use std::path::Path;

use vdl_core::nn::Checkpoint;
use vdl_core::tracking::{closed_loop_simulate, ClosedLoopConfig, NnController, NnControllerConfig, ReferencePath};
use vdl_core::vehicle::VehicleParams;

fn main() -> vdl_core::Result<()> {
    let params = VehicleParams::default();
    let path = ReferencePath::default_track();
    for file in std::env::args().skip(1) {
        let ckpt = Checkpoint::load(Path::new(&file))?;
        let mut c = NnController::new(file.clone(), ckpt.inverse_model()?, NnControllerConfig::default());
        let r = closed_loop_simulate(&mut c, &path, &ClosedLoopConfig::default(), &params)?;
        println!(
            "{}: completed {} div {:?} sim {:.1}s",
            file,
            r.completed,
            r.divergence,
            r.trace.last().unwrap().t
        );
        let m = &r.metrics;
        println!(
            "  speed rms {:.3} mean {:.3} max {:.3}; lateral rms {:.3} mean {:.3} max {:.3}",
            m.speed.rms, m.speed.mean, m.speed.max, m.lateral.rms, m.lateral.mean, m.lateral.max
        );
        for s in &m.sections {
            println!("  sec {} lat max {:.3} rms {:.3} speed mean {:.3}", s.id, s.lateral.max, s.lateral.rms, s.speed.mean);
        }
    }
    Ok(())
}
