use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};

pub const DEFAULT_TRACK_FILE: &str = include_str!("../../../../configs/default.trk");
/// Spacing of the dense path samples.
pub const SAMPLE_SPACING: f64 = 0.05;
/// Projections farther than this from the path count as divergence.
pub const MAX_PATH_DISTANCE: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Turn {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SectionShape {
    Straight { length: f64 },
    Arc { turn: Turn, radius: f64, angle: f64 },
}

impl SectionShape {
    pub fn length(&self) -> f64 {
        match *self {
            SectionShape::Straight { length } => length,
            SectionShape::Arc { radius, angle, .. } => radius * angle,
        }
    }

    /// Signed curvature, positive turning left.
    pub fn curvature(&self) -> f64 {
        match *self {
            SectionShape::Straight { .. } => 0.0,
            SectionShape::Arc { turn: Turn::Left, radius, .. } => 1.0 / radius,
            SectionShape::Arc { turn: Turn::Right, radius, .. } => -1.0 / radius,
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match *self {
            SectionShape::Straight { .. } => None,
            SectionShape::Arc { radius, .. } => Some(radius),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionSpec {
    pub id: u32,
    pub shape: SectionShape,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackSpec {
    pub v_ref: f64,
    pub sections: Vec<SectionSpec>,
}

impl TrackSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut v_ref = None;
        let mut sections = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Config(format!("track line {}: {msg}: {raw:?}", n + 1));
            let tok: Vec<&str> = line.split_whitespace().collect();
            let num = |i: usize| -> Result<f64> {
                let v: f64 = tok
                    .get(i)
                    .ok_or_else(|| bad("missing field"))?
                    .parse()
                    .map_err(|_| bad("not a number"))?;
                if v.is_finite() && v > 0.0 {
                    Ok(v)
                } else {
                    Err(bad("value must be positive"))
                }
            };
            let id = || -> Result<u32> {
                tok.get(1)
                    .ok_or_else(|| bad("missing section id"))?
                    .parse()
                    .map_err(|_| bad("bad section id"))
            };
            let shape = match tok[0] {
                "v_ref" if tok.len() == 2 => {
                    v_ref = Some(num(1)?);
                    continue;
                }
                "straight" if tok.len() == 3 => SectionShape::Straight { length: num(2)? },
                "arc" if tok.len() == 5 => SectionShape::Arc {
                    turn: match tok[2] {
                        "left" => Turn::Left,
                        "right" => Turn::Right,
                        _ => return Err(bad("turn must be left or right")),
                    },
                    radius: num(3)?,
                    angle: num(4)?.to_radians(),
                },
                _ => return Err(bad("unrecognised entry")),
            };
            sections.push(SectionSpec { id: id()?, shape });
        }
        if sections.is_empty() {
            return Err(Error::Config("track has no sections".into()));
        }
        Ok(Self {
            v_ref: v_ref.ok_or_else(|| Error::Config("track is missing v_ref".into()))?,
            sections,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    pub x: f64,
    pub y: f64,
    /// Unwrapped tangent heading (rad).
    pub heading: f64,
    pub curvature: f64,
    pub s: f64,
    pub section: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionInfo {
    pub id: u32,
    pub s_start: f64,
    pub s_end: f64,
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub s: f64,
    /// Signed distance, positive when the point is left of the tangent.
    pub lateral: f64,
    pub heading: f64,
    pub x: f64,
    pub y: f64,
    pub section: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePath {
    samples: Vec<PathSample>,
    sections: Vec<SectionInfo>,
    v_ref: f64,
}

impl ReferencePath {
    /// Dense samples of the sections, starting at the origin heading +x.
    pub fn from_spec(spec: &TrackSpec) -> Self {
        let mut samples = Vec::new();
        let mut sections = Vec::new();
        let (mut x, mut y, mut h, mut s0) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for sec in &spec.sections {
            let len = sec.shape.length();
            let k = sec.shape.curvature();
            let n = (len / SAMPLE_SPACING).ceil().max(1.0) as usize;
            let first = if samples.is_empty() { 0 } else { 1 };
            for i in first..=n {
                let u = len * i as f64 / n as f64;
                let (px, py, ph) = pose_along(x, y, h, k, u);
                samples.push(PathSample {
                    x: px,
                    y: py,
                    heading: ph,
                    curvature: k,
                    s: s0 + u,
                    section: sec.id,
                });
            }
            let (ex, ey, eh) = pose_along(x, y, h, k, len);
            sections.push(SectionInfo {
                id: sec.id,
                s_start: s0,
                s_end: s0 + len,
                radius: sec.shape.radius(),
            });
            x = ex;
            y = ey;
            h = eh;
            s0 += len;
        }
        Self {
            samples,
            sections,
            v_ref: spec.v_ref,
        }
    }

    pub fn default_track() -> Self {
        Self::from_spec(&TrackSpec::parse(DEFAULT_TRACK_FILE).expect("default track parses"))
    }

    /// Polyline through `points`, one section, finite-difference curvature.
    pub fn from_points(points: &[(f64, f64)], v_ref: f64) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Config("a path needs at least two points".into()));
        }
        let mut samples: Vec<PathSample> = Vec::with_capacity(points.len());
        let mut s = 0.0;
        let mut prev_h: Option<f64> = None;
        for i in 0..points.len() {
            let (a, b) = if i + 1 < points.len() {
                (points[i], points[i + 1])
            } else {
                (points[i - 1], points[i])
            };
            let seg = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
            if seg <= 0.0 {
                return Err(Error::Config(format!("repeated path point at index {i}")));
            }
            let raw = (b.1 - a.1).atan2(b.0 - a.0);
            let h = match prev_h {
                Some(p) => p + wrap_angle(raw - p),
                None => raw,
            };
            if i > 0 {
                let (p, q) = (points[i - 1], points[i]);
                s += ((q.0 - p.0).powi(2) + (q.1 - p.1).powi(2)).sqrt();
            }
            samples.push(PathSample {
                x: points[i].0,
                y: points[i].1,
                heading: h,
                curvature: 0.0,
                s,
                section: 1,
            });
            prev_h = Some(h);
        }
        for i in 1..samples.len() - 1 {
            let ds = samples[i + 1].s - samples[i - 1].s;
            samples[i].curvature = (samples[i + 1].heading - samples[i - 1].heading) / ds;
        }
        let total = samples.last().map_or(0.0, |p| p.s);
        Ok(Self {
            samples,
            sections: vec![SectionInfo {
                id: 1,
                s_start: 0.0,
                s_end: total,
                radius: None,
            }],
            v_ref,
        })
    }

    pub fn samples(&self) -> &[PathSample] {
        &self.samples
    }

    pub fn sections(&self) -> &[SectionInfo] {
        &self.sections
    }

    pub fn section(&self, id: u32) -> Option<&SectionInfo> {
        self.sections.iter().find(|s| s.id == id)
    }

    pub fn v_ref(&self) -> f64 {
        self.v_ref
    }

    pub fn with_v_ref(mut self, v_ref: f64) -> Self {
        self.v_ref = v_ref;
        self
    }

    pub fn length(&self) -> f64 {
        self.samples.last().map_or(0.0, |p| p.s)
    }

    pub fn section_at(&self, s: f64) -> u32 {
        self.sections
            .iter()
            .find(|sec| s < sec.s_end)
            .or(self.sections.last())
            .map_or(0, |sec| sec.id)
    }

    /// Pose at arc length `s`, linear between samples and extended along
    /// the end tangents outside `[0, length]`.
    pub fn point_at(&self, s: f64) -> PathSample {
        let n = self.samples.len();
        let i = match self.samples.partition_point(|p| p.s <= s) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        let t = (s - a.s) / (b.s - a.s);
        if (0.0..=1.0).contains(&t) {
            PathSample {
                x: a.x + t * (b.x - a.x),
                y: a.y + t * (b.y - a.y),
                heading: a.heading + t * (b.heading - a.heading),
                curvature: if t < 0.5 { a.curvature } else { b.curvature },
                s,
                section: if t < 0.5 { a.section } else { b.section },
            }
        } else {
            let end = if t < 0.0 { a } else { b };
            let d = s - end.s;
            PathSample {
                x: end.x + d * end.heading.cos(),
                y: end.y + d * end.heading.sin(),
                heading: end.heading,
                curvature: 0.0,
                s,
                section: end.section,
            }
        }
    }

    /// Closest point over the whole path.
    pub fn project(&self, x: f64, y: f64) -> Result<Projection> {
        self.project_in(x, y, 0, self.samples.len())
    }

    /// Closest point within `[hint - back, hint + ahead]` of arc length,
    /// falling back to a global search when that window is far off.
    pub fn project_near(&self, x: f64, y: f64, hint: f64, back: f64, ahead: f64) -> Result<Projection> {
        let lo = self.samples.partition_point(|p| p.s < hint - back);
        let hi = self.samples.partition_point(|p| p.s <= hint + ahead);
        match self.project_in(x, y, lo, hi) {
            Ok(p) if p.lateral.abs() < 0.5 * MAX_PATH_DISTANCE => Ok(p),
            _ => self.project(x, y),
        }
    }

    fn project_in(&self, x: f64, y: f64, lo: usize, hi: usize) -> Result<Projection> {
        let n = self.samples.len();
        let (lo, hi) = (lo.min(n - 1), hi.clamp(lo.min(n - 1) + 1, n));
        let nearest = (lo..hi)
            .min_by(|&i, &j| {
                let di = (self.samples[i].x - x).powi(2) + (self.samples[i].y - y).powi(2);
                let dj = (self.samples[j].x - x).powi(2) + (self.samples[j].y - y).powi(2);
                di.total_cmp(&dj)
            })
            .expect("non-empty search window");
        let mut best: Option<(f64, Projection)> = None;
        for seg in [nearest.saturating_sub(1), nearest] {
            if seg + 1 >= n {
                continue;
            }
            let cand = self.project_on_segment(seg, x, y);
            let d = (cand.x - x).powi(2) + (cand.y - y).powi(2);
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, cand));
            }
        }
        let (_, p) = best.expect("path has at least one segment");
        if p.lateral.abs() > MAX_PATH_DISTANCE {
            return Err(Error::Divergence(format!(
                "({x:.2}, {y:.2}) is {:.1} m from the path",
                p.lateral.abs()
            )));
        }
        Ok(p)
    }

    fn project_on_segment(&self, i: usize, x: f64, y: f64) -> Projection {
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let len2 = dx * dx + dy * dy;
        let mut t = ((x - a.x) * dx + (y - a.y) * dy) / len2;
        let last = i + 2 == self.samples.len();
        if !(i == 0 && t < 0.0) && !(last && t > 1.0) {
            t = t.clamp(0.0, 1.0);
        }
        let s = a.s + t * (b.s - a.s);
        let p = self.point_at(s);
        let len = len2.sqrt();
        let (tx, ty) = (dx / len, dy / len);
        let lateral = tx * (y - p.y) - ty * (x - p.x);
        Projection {
            s,
            lateral,
            heading: p.heading,
            x: p.x,
            y: p.y,
            section: p.section,
        }
    }
}

fn pose_along(x: f64, y: f64, h: f64, k: f64, u: f64) -> (f64, f64, f64) {
    if k == 0.0 {
        (x + u * h.cos(), y + u * h.sin(), h)
    } else {
        let h1 = h + k * u;
        (x + (h1.sin() - h.sin()) / k, y - (h1.cos() - h.cos()) / k, h1)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = (a + PI).rem_euclid(2.0 * PI) - PI;
    if r <= -PI {
        r += 2.0 * PI;
    }
    r
}
