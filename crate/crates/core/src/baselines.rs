//! Pure pursuit and Stanley steering with PI speed control.

use std::path::Path;

use crate::error::{Error, Result};
use crate::kvconfig::KvFile;
use crate::tracking::{wrap_angle, Controller, Observation, ReferencePath};
use crate::vehicle::{ControlInput, VehicleParams, VehicleState, EPSILON_V};

pub const DEFAULT_BASELINES_FILE: &str = include_str!("../../../configs/baselines.params");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiState {
    pub kp: f64,
    pub ki: f64,
    pub integral: f64,
    /// Bound on |integral| (m).
    pub integral_limit: f64,
}

impl Default for PiState {
    fn default() -> Self {
        Self {
            kp: 600.0,
            ki: 10.0,
            integral: 0.0,
            integral_limit: 125.0,
        }
    }
}

/// Total drive torque from the speed error; the integral is then advanced
/// by `dt` and clamped.
pub fn pi_longitudinal(v_ref: f64, v: f64, pi: &mut PiState, dt: f64) -> f64 {
    assert!(dt > 0.0, "dt must be positive");
    let e = v_ref - v;
    let torque = pi.kp * e + pi.ki * pi.integral;
    pi.integral = (pi.integral + e * dt).clamp(-pi.integral_limit, pi.integral_limit);
    torque
}

/// Drive torque on the front wheels, braking torque on all four.
pub fn split_torque(total: f64) -> [f64; 4] {
    if total >= 0.0 {
        [0.5 * total, 0.5 * total, 0.0, 0.0]
    } else {
        [0.25 * total; 4]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LateralGains {
    pub stanley_k: f64,
    /// Anticipation time of the pure-pursuit preview.
    pub t_a: f64,
    pub steering_limit: f64,
}

impl Default for LateralGains {
    fn default() -> Self {
        Self {
            stanley_k: 0.75,
            t_a: 1.5,
            steering_limit: 0.5,
        }
    }
}

pub fn preview_distance(v_g: f64, params: &VehicleParams, gains: &LateralGains) -> f64 {
    params.l_f + gains.t_a * v_g
}

/// Rear-axle pure pursuit towards the path point one preview distance
/// ahead of arc length `s_now`.
pub fn pure_pursuit(
    state: &VehicleState,
    path: &ReferencePath,
    s_now: f64,
    params: &VehicleParams,
    gains: &LateralGains,
) -> Result<f64> {
    let lp = preview_distance(state.speed(), params, gains);
    let goal = path.point_at(s_now + lp);
    if !(goal.x.is_finite() && goal.y.is_finite()) {
        return Err(Error::Divergence("no pure-pursuit goal point".into()));
    }
    let (c, s) = (state.psi.cos(), state.psi.sin());
    let rear = (state.x - params.l_r * c, state.y - params.l_r * s);
    let (dx, dy) = (goal.x - rear.0, goal.y - rear.1);
    let gx = c * dx + s * dy;
    let gy = -s * dx + c * dy;
    let ld2 = gx * gx + gy * gy;
    if ld2 <= 0.0 {
        return Err(Error::Divergence("pure-pursuit goal coincides with the rear axle".into()));
    }
    let curvature = 2.0 * gy / ld2;
    let delta = (params.wheelbase() * curvature).atan();
    Ok(delta.clamp(-gains.steering_limit, gains.steering_limit))
}

/// Stanley law at the front axle. `e_front` is positive when the path lies
/// to the left of the front axle.
pub fn stanley_law(heading_error: f64, e_front: f64, v_g: f64, gains: &LateralGains) -> f64 {
    let delta = heading_error + (gains.stanley_k * e_front / v_g.max(EPSILON_V)).atan();
    delta.clamp(-gains.steering_limit, gains.steering_limit)
}

pub fn stanley(
    state: &VehicleState,
    path: &ReferencePath,
    s_hint: f64,
    params: &VehicleParams,
    gains: &LateralGains,
) -> Result<f64> {
    let (c, s) = (state.psi.cos(), state.psi.sin());
    let front = (state.x + params.l_f * c, state.y + params.l_f * s);
    let p = path.project_near(front.0, front.1, s_hint, 10.0, 20.0)?;
    let heading_error = wrap_angle(p.heading - state.psi);
    Ok(stanley_law(heading_error, -p.lateral, state.speed(), gains))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LateralLaw {
    PurePursuit,
    Stanley,
}

impl LateralLaw {
    pub fn name(&self) -> &'static str {
        match self {
            LateralLaw::PurePursuit => "pure-pursuit",
            LateralLaw::Stanley => "stanley",
        }
    }
}

impl std::str::FromStr for LateralLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure-pursuit" | "pure_pursuit" | "pp" => Ok(LateralLaw::PurePursuit),
            "stanley" => Ok(LateralLaw::Stanley),
            _ => Err(Error::Config(format!("unknown lateral controller {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    pub pi: PiState,
    pub lateral: LateralGains,
    pub period: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            pi: PiState::default(),
            lateral: LateralGains::default(),
            period: 0.01,
        }
    }
}

pub const BASELINE_KEYS: &[&str] = &[
    "pi.kp",
    "pi.ki",
    "pi.integral_limit",
    "stanley.k",
    "pure_pursuit.t_a",
    "steering_limit",
    "period",
];

impl BaselineConfig {
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        kv.reject_unknown(BASELINE_KEYS)?;
        let mut c = Self::default();
        let fields: [(&str, &mut f64); 7] = [
            ("pi.kp", &mut c.pi.kp),
            ("pi.ki", &mut c.pi.ki),
            ("pi.integral_limit", &mut c.pi.integral_limit),
            ("stanley.k", &mut c.lateral.stanley_k),
            ("pure_pursuit.t_a", &mut c.lateral.t_a),
            ("steering_limit", &mut c.lateral.steering_limit),
            ("period", &mut c.period),
        ];
        for (key, slot) in fields {
            if let Some(v) = kv.parse_value::<f64>(key)? {
                *slot = v;
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn from_kv_text(text: &str) -> Result<Self> {
        Self::from_kv(&KvFile::parse(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_kv_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("pi.kp", self.pi.kp),
            ("pi.ki", self.pi.ki),
            ("pi.integral_limit", self.pi.integral_limit),
            ("stanley.k", self.lateral.stanley_k),
            ("pure_pursuit.t_a", self.lateral.t_a),
            ("steering_limit", self.lateral.steering_limit),
            ("period", self.period),
        ];
        for (k, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{k} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        format!(
            "pi.kp = {:?}\npi.ki = {:?}\npi.integral_limit = {:?}\nstanley.k = {:?}\npure_pursuit.t_a = {:?}\nsteering_limit = {:?}\nperiod = {:?}\n",
            self.pi.kp,
            self.pi.ki,
            self.pi.integral_limit,
            self.lateral.stanley_k,
            self.lateral.t_a,
            self.lateral.steering_limit,
            self.period
        )
    }
}

/// Lateral law plus PI speed loop, both at `config.period`.
#[derive(Debug, Clone)]
pub struct BaselineController {
    pub law: LateralLaw,
    pub config: BaselineConfig,
    pub params: VehicleParams,
    pi: PiState,
}

impl BaselineController {
    pub fn new(law: LateralLaw, config: BaselineConfig, params: VehicleParams) -> Self {
        Self {
            law,
            pi: config.pi,
            config,
            params,
        }
    }

    pub fn pi_state(&self) -> &PiState {
        &self.pi
    }
}

impl Controller for BaselineController {
    fn name(&self) -> String {
        self.law.name().to_string()
    }

    fn period(&self) -> f64 {
        self.config.period
    }

    fn control(&mut self, obs: &Observation<'_>) -> Result<ControlInput> {
        let gains = &self.config.lateral;
        let delta = match self.law {
            LateralLaw::PurePursuit => pure_pursuit(obs.state, obs.path, obs.projection.s, &self.params, gains)?,
            LateralLaw::Stanley => stanley(obs.state, obs.path, obs.projection.s, &self.params, gains)?,
        };
        let torque = pi_longitudinal(obs.path.v_ref(), obs.state.speed(), &mut self.pi, self.config.period);
        Ok(ControlInput::new(split_torque(torque), delta))
    }
}
