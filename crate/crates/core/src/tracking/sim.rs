use crate::error::{Error, Result};
use crate::vehicle::{rk4_step, ControlInput, VehicleParams, VehicleState, DEFAULT_DT};

use super::metrics::TrackingMetrics;
use super::path::{Projection, ReferencePath};

/// What a controller sees when it is invoked.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    pub t: f64,
    pub state: &'a VehicleState,
    pub path: &'a ReferencePath,
    /// Projection of the centre of gravity onto the path.
    pub projection: &'a Projection,
}

pub trait Controller {
    fn name(&self) -> String;
    /// Seconds between invocations; the command is held in between.
    fn period(&self) -> f64;
    fn control(&mut self, obs: &Observation<'_>) -> Result<ControlInput>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedLoopConfig {
    pub dt: f64,
    pub record_dt: f64,
    pub max_duration: f64,
    pub lateral_limit: f64,
    pub min_speed: f64,
    /// Defaults to standing on the path start at reference speed.
    pub initial_state: Option<VehicleState>,
}

impl Default for ClosedLoopConfig {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            record_dt: 0.01,
            max_duration: 180.0,
            lateral_limit: 10.0,
            min_speed: 0.5,
            initial_state: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub speed: f64,
    pub lateral: f64,
    pub section: u32,
    pub control: ControlInput,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub controller: String,
    pub trace: Vec<TraceRow>,
    pub metrics: TrackingMetrics,
    pub completed: bool,
    /// Why the run stopped early, if it did.
    pub divergence: Option<String>,
    pub final_state: VehicleState,
}

impl RunResult {
    pub fn diverged(&self) -> bool {
        self.divergence.is_some()
    }
}

/// Path start, aligned with the tangent, rolling at reference speed.
pub fn start_state(path: &ReferencePath, params: &VehicleParams) -> VehicleState {
    let p = path.point_at(0.0);
    VehicleState {
        x: p.x,
        y: p.y,
        psi: p.heading,
        vx: path.v_ref(),
        omega: [path.v_ref() / params.r_eff; 4],
        ..VehicleState::default()
    }
}

fn steps_per(period: f64, dt: f64, what: &str) -> Result<usize> {
    let n = (period / dt).round();
    if n < 1.0 || ((n * dt) - period).abs() > 1e-9 * period.max(1.0) {
        return Err(Error::Config(format!(
            "{what} {period} s is not a positive multiple of the {dt} s step"
        )));
    }
    Ok(n as usize)
}

/// Fixed-step closed loop: the controller runs every `period()`, errors are
/// recorded every `record_dt`; stops at the end of the path, on divergence,
/// or after `max_duration`.
pub fn closed_loop_simulate(
    controller: &mut dyn Controller,
    path: &ReferencePath,
    cfg: &ClosedLoopConfig,
    params: &VehicleParams,
) -> Result<RunResult> {
    let control_every = steps_per(controller.period(), cfg.dt, "control period")?;
    let record_every = steps_per(cfg.record_dt, cfg.dt, "record period")?;
    let max_steps = (cfg.max_duration / cfg.dt).round() as usize;
    let mut state = cfg.initial_state.unwrap_or_else(|| start_state(path, params));
    let mut hint = path.project(state.x, state.y).map(|p| p.s).unwrap_or(0.0);
    let mut control = ControlInput::default();
    let mut trace = Vec::new();
    let mut divergence = None;
    let mut completed = false;
    for k in 0..=max_steps {
        let t = k as f64 * cfg.dt;
        let act = k % control_every == 0;
        let record = k % record_every == 0;
        if act || record {
            let proj = match path.project_near(state.x, state.y, hint, 10.0, 40.0) {
                Ok(p) => p,
                Err(e) => {
                    divergence = Some(format!("t = {t:.3} s: {e}"));
                    break;
                }
            };
            hint = proj.s;
            if act {
                let obs = Observation {
                    t,
                    state: &state,
                    path,
                    projection: &proj,
                };
                match controller.control(&obs) {
                    Ok(u) => control = u,
                    Err(e) => {
                        divergence = Some(format!("t = {t:.3} s: controller failed: {e}"));
                        break;
                    }
                }
            }
            if record {
                let speed = state.speed();
                trace.push(TraceRow {
                    t,
                    s: proj.s,
                    x: state.x,
                    y: state.y,
                    speed,
                    lateral: proj.lateral,
                    section: proj.section,
                    control,
                });
                if proj.lateral.abs() > cfg.lateral_limit {
                    divergence = Some(format!(
                        "t = {t:.3} s: lateral error {:.2} m exceeds {} m",
                        proj.lateral, cfg.lateral_limit
                    ));
                    break;
                }
                if speed < cfg.min_speed {
                    divergence = Some(format!("t = {t:.3} s: speed {speed:.3} m/s below {}", cfg.min_speed));
                    break;
                }
                if proj.s >= path.length() {
                    completed = true;
                    break;
                }
            }
        }
        if k == max_steps {
            break;
        }
        state = rk4_step(&state, &control, params, cfg.dt);
        if !state.is_finite() {
            divergence = Some(format!("t = {:.3} s: non-finite vehicle state", t + cfg.dt));
            break;
        }
    }
    let rows: Vec<(u32, f64, f64)> = trace
        .iter()
        .map(|r| (r.section, r.speed - path.v_ref(), r.lateral))
        .collect();
    let ids: Vec<u32> = path.sections().iter().map(|s| s.id).collect();
    Ok(RunResult {
        controller: controller.name(),
        metrics: TrackingMetrics::from_rows(&rows, &ids),
        trace,
        completed,
        divergence,
        final_state: state,
    })
}
