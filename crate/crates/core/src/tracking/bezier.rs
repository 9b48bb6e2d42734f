use crate::vehicle::VehicleState;

use super::path::ReferencePath;

pub const QUERY_HORIZON: f64 = 3.0;
pub const QUERY_SAMPLES: usize = 301;

#[derive(Debug, Clone, PartialEq)]
pub struct BezierQuery {
    pub control: [(f64, f64); 4],
    /// World-frame samples at uniform parameter values.
    pub world: Vec<(f64, f64)>,
    /// The same samples with P0 at the origin and the vehicle heading on +x.
    pub body: Vec<(f64, f64)>,
}

pub fn bezier_point(p: &[(f64, f64); 4], u: f64) -> (f64, f64) {
    let v = 1.0 - u;
    let (b0, b1, b2, b3) = (v * v * v, 3.0 * v * v * u, 3.0 * v * u * u, u * u * u);
    (
        b0 * p[0].0 + b1 * p[1].0 + b2 * p[2].0 + b3 * p[3].0,
        b0 * p[0].1 + b1 * p[1].1 + b2 * p[2].1 + b3 * p[3].1,
    )
}

/// Cubic curve from the vehicle to the path point `v_ref * horizon` ahead of
/// arc length `s_now`.
pub fn build_bezier_query(
    state: &VehicleState,
    path: &ReferencePath,
    s_now: f64,
    horizon: f64,
    samples: usize,
) -> BezierQuery {
    assert!(samples >= 2, "a query needs at least two samples");
    let (c, s) = (state.psi.cos(), state.psi.sin());
    let p0 = (state.x, state.y);
    let lead = state.speed() * horizon / 3.0;
    let p1 = (p0.0 + lead * c, p0.1 + lead * s);
    let reach = path.v_ref() * horizon;
    let end = path.point_at(s_now + reach);
    let p3 = (end.x, end.y);
    let tail = reach / 3.0;
    let p2 = (p3.0 - tail * end.heading.cos(), p3.1 - tail * end.heading.sin());
    let control = [p0, p1, p2, p3];
    let world: Vec<(f64, f64)> = (0..samples)
        .map(|k| bezier_point(&control, k as f64 / (samples - 1) as f64))
        .collect();
    let body = world
        .iter()
        .map(|&(x, y)| {
            let (dx, dy) = (x - p0.0, y - p0.1);
            (c * dx + s * dy, -s * dx + c * dy)
        })
        .collect();
    BezierQuery { control, world, body }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracking::path::ReferencePath;

    fn on_path(path: &ReferencePath, s: f64, lateral: f64, speed: f64) -> VehicleState {
        let p = path.point_at(s);
        VehicleState {
            x: p.x - lateral * p.heading.sin(),
            y: p.y + lateral * p.heading.cos(),
            psi: p.heading,
            vx: speed,
            ..VehicleState::default()
        }
    }

    #[test]
    fn aligned_on_straight_follows_path() {
        let path = ReferencePath::default_track();
        let st = on_path(&path, 20.0, 0.0, 10.0);
        let q = build_bezier_query(&st, &path, 20.0, QUERY_HORIZON, QUERY_SAMPLES);
        assert_eq!(q.world.len(), 301);
        assert_eq!(q.body[0], (0.0, 0.0));
        let dev = q
            .world
            .iter()
            .map(|&(x, y)| path.project(x, y).unwrap().lateral.abs())
            .fold(0.0, f64::max);
        assert!(dev < 0.3, "deviation {dev}");
        let (ex, ey) = q.body[300];
        assert!((ex - 30.0).abs() < 1e-9 && ey.abs() < 1e-9);
    }

    #[test]
    fn offset_vehicle_rejoins_the_centreline() {
        let path = ReferencePath::default_track();
        let st = on_path(&path, 40.0, 1.0, 10.0);
        let q = build_bezier_query(&st, &path, 40.0, QUERY_HORIZON, QUERY_SAMPLES);
        let (x, y) = q.world[300];
        assert!(path.project(x, y).unwrap().lateral.abs() < 1e-9);
        assert_eq!(q.body[0], (0.0, 0.0));
        // Path is to the right of the vehicle in its own frame.
        assert!(q.body[300].1 < -0.99);
    }

    #[test]
    fn body_frame_is_rotation_invariant() {
        let path = ReferencePath::default_track();
        let sec = path.section(3).unwrap();
        let s = sec.s_start + 10.0;
        let st = on_path(&path, s, 0.0, 10.0);
        let q = build_bezier_query(&st, &path, s, QUERY_HORIZON, QUERY_SAMPLES);
        let (ex, ey) = q.body[300];
        assert!((ex - 30.0).abs() < 1e-6 && ey.abs() < 1e-6);
    }

    #[test]
    fn endpoints() {
        let p = [(0.0, 0.0), (1.0, 2.0), (3.0, 2.0), (4.0, 0.0)];
        assert_eq!(bezier_point(&p, 0.0), (0.0, 0.0));
        assert_eq!(bezier_point(&p, 1.0), (4.0, 0.0));
        assert_eq!(bezier_point(&p, 0.5), (2.0, 1.5));
    }
}
