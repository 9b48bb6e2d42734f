//! Closed-loop evaluation on a reference track.

pub mod bezier;
pub mod metrics;
pub mod nn_controller;
pub mod path;
pub mod sim;

pub use bezier::{bezier_point, build_bezier_query, BezierQuery, QUERY_HORIZON, QUERY_SAMPLES};
pub use metrics::{SectionMetrics, Summary, TrackingMetrics};
pub use nn_controller::{NnController, NnControllerConfig, NN_PERIOD, STEERING_LIMIT};
pub use path::{
    wrap_angle, PathSample, Projection, ReferencePath, SectionInfo, SectionShape, SectionSpec, TrackSpec, Turn,
    DEFAULT_TRACK_FILE, MAX_PATH_DISTANCE,
};
pub use sim::{closed_loop_simulate, start_state, ClosedLoopConfig, Controller, Observation, RunResult, TraceRow};

/// Highest speed for which a kinematic single-track model stays valid on a
/// curve of radius `r`.
pub fn kinematic_speed_limit(r: f64, mu: f64, g: f64) -> f64 {
    assert!(r > 0.0, "radius must be positive");
    (0.5 * mu * g * r).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn speed_limits() {
        assert!((kinematic_speed_limit(20.0, 1.0, 9.81) - 9.90).abs() < 0.01);
        assert!((kinematic_speed_limit(10.0, 1.0, 9.81) - 7.00).abs() < 0.01);
        assert_eq!(kinematic_speed_limit(10.0, 0.0, 9.81), 0.0);
    }
}
