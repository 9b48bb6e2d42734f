//! Closed-loop result tables and figures.

use std::fmt::Write;

use vdl_core::tracking::{ReferencePath, RunResult, Summary, TrackingMetrics};

use crate::svg::{self, Plot, Series};

pub const METRIC_HEADER: &str = "controller,rms,average,std_dev,max,status";

pub fn status(r: &RunResult) -> &'static str {
    if r.completed {
        "completed"
    } else if r.diverged() {
        "diverged"
    } else {
        "timeout"
    }
}

/// Six decimals, without a sign on values that round to zero.
fn fixed6(v: f64) -> String {
    let text = format!("{v:.6}");
    if text == "-0.000000" {
        text[1..].to_string()
    } else {
        text
    }
}

fn summary_fields(s: &Summary) -> String {
    [s.rms, s.mean, s.std, s.max.abs()].map(fixed6).join(",")
}

/// One row per controller; `max` is the largest magnitude.
pub fn metric_table(results: &[RunResult], comment: &str, pick: fn(&TrackingMetrics) -> &Summary) -> String {
    let mut out = format!("# {comment}\n{METRIC_HEADER}\n");
    for r in results {
        let _ = writeln!(out, "{},{},{}", r.controller, summary_fields(pick(&r.metrics)), status(r));
    }
    out
}

pub fn section_table(results: &[RunResult], comment: &str) -> String {
    let mut out = format!(
        "# {comment}\ncontroller,section,speed_rms,speed_average,speed_std_dev,speed_max,lateral_rms,lateral_average,lateral_std_dev,lateral_max\n"
    );
    for r in results {
        for s in &r.metrics.sections {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.controller,
                s.id,
                summary_fields(&s.speed),
                summary_fields(&s.lateral)
            );
        }
    }
    out
}

pub fn trace_csv(r: &RunResult) -> String {
    let mut out = String::from("t,s,X,Y,V,lateral_error,delta,T_fl,T_fr,T_rl,T_rr\n");
    for row in &r.trace {
        let [fl, fr, rl, rr] = row.control.torques;
        let _ = writeln!(
            out,
            "{:.3},{:.4},{:.4},{:.4},{:.4},{:.5},{:.6},{:.3},{:.3},{:.3},{:.3}",
            row.t, row.s, row.x, row.y, row.speed, row.lateral, row.control.delta, fl, fr, rl, rr
        );
    }
    out
}

fn series_vs_s(results: &[RunResult], f: impl Fn(&vdl_core::tracking::TraceRow) -> f64) -> Vec<Series> {
    results
        .iter()
        .map(|r| Series {
            name: r.controller.clone(),
            points: r.trace.iter().map(|row| (row.s, f(row))).collect(),
        })
        .collect()
}

/// `(file name, document)` for every figure.
pub fn figures(results: &[RunResult], path: &ReferencePath) -> Vec<(String, String)> {
    let line = |title: &str, y_label: &str, series: Vec<Series>, reference: Option<&[(f64, f64)]>| {
        svg::render(&Plot {
            title,
            x_label: "path position s (m)",
            y_label,
            series: &series,
            reference,
            labels: &[],
            equal_aspect: false,
        })
    };
    let v_ref = [(0.0, path.v_ref()), (path.length(), path.v_ref())];
    let mut out = vec![
        (
            "steering.svg".to_string(),
            line("Steering command", "delta (rad)", series_vs_s(results, |r| r.control.delta), None),
        ),
        (
            "torque_front.svg".to_string(),
            line(
                "Front axle torque",
                "T_fl + T_fr (N m)",
                series_vs_s(results, |r| r.control.torques[0] + r.control.torques[1]),
                None,
            ),
        ),
        (
            "torque_rear.svg".to_string(),
            line(
                "Rear axle torque",
                "T_rl + T_rr (N m)",
                series_vs_s(results, |r| r.control.torques[2] + r.control.torques[3]),
                None,
            ),
        ),
        (
            "speed.svg".to_string(),
            line("Speed", "V (m/s)", series_vs_s(results, |r| r.speed), Some(&v_ref)),
        ),
        (
            "lateral_error.svg".to_string(),
            line("Lateral error", "|e| (m)", series_vs_s(results, |r| r.lateral.abs()), None),
        ),
    ];
    let reference: Vec<(f64, f64)> = path.samples().iter().map(|p| (p.x, p.y)).collect();
    let labels: Vec<(f64, f64, String)> = path
        .sections()
        .iter()
        .map(|s| {
            let p = path.point_at(s.s_start);
            (p.x, p.y, s.id.to_string())
        })
        .collect();
    let series: Vec<Series> = results
        .iter()
        .map(|r| Series {
            name: r.controller.clone(),
            points: r.trace.iter().map(|row| (row.x, row.y)).collect(),
        })
        .collect();
    out.push((
        "trajectory.svg".to_string(),
        svg::render(&Plot {
            title: "Trajectory",
            x_label: "X (m)",
            y_label: "Y (m)",
            series: &series,
            reference: Some(&reference),
            labels: &labels,
            equal_aspect: true,
        }),
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_to_zero_drops_sign() {
        assert_eq!(fixed6(-1e-9), "0.000000");
        assert_eq!(fixed6(-0.5), "-0.500000");
        assert_eq!(fixed6(f64::NAN), "NaN");
    }
}
