use vdl_core::baselines::{BaselineConfig, BaselineController, LateralLaw};
use vdl_core::tracking::{closed_loop_simulate, ClosedLoopConfig, ReferencePath};
use vdl_core::vehicle::VehicleParams;

fn main() -> vdl_core::Result<()> {
    let params = VehicleParams::default();
    let path = ReferencePath::default_track();
    for law in [LateralLaw::PurePursuit, LateralLaw::Stanley] {
        let mut c = BaselineController::new(law, BaselineConfig::default(), params);
        let t = std::time::Instant::now();
        let r = closed_loop_simulate(&mut c, &path, &ClosedLoopConfig::default(), &params)?;
        println!(
            "{}: completed {} div {:?} in {:.2}s wall, sim {:.1}s",
            r.controller,
            r.completed,
            r.divergence,
            t.elapsed().as_secs_f64(),
            r.trace.last().unwrap().t
        );
        println!(
            "  speed rms {:.3} mean {:.3} max {:.3}; lateral rms {:.3} mean {:.3} max {:.3}",
            r.metrics.speed.rms, r.metrics.speed.mean, r.metrics.speed.max, r.metrics.lateral.rms, r.metrics.lateral.mean, r.metrics.lateral.max
        );
        for s in &r.metrics.sections {
            println!("  sec {} lat max {:.3} rms {:.3} speed mean {:.3}", s.id, s.lateral.max, s.lateral.rms, s.speed.mean);
        }
    }
    Ok(())
}
