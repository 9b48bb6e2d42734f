use serde::{Deserialize, Serialize};

/// RMS, mean, population standard deviation and signed peak of a signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rms: f64,
    pub mean: f64,
    pub std: f64,
    /// Sample with the largest magnitude, sign kept.
    pub max: f64,
    pub count: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self {
                rms: f64::NAN,
                mean: f64::NAN,
                std: f64::NAN,
                max: f64::NAN,
                count: 0,
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let rms = (values.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
        let max = values.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        Self {
            rms,
            mean,
            std: var.sqrt(),
            max,
            count: values.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionMetrics {
    pub id: u32,
    pub speed: Summary,
    pub lateral: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackingMetrics {
    /// Ground speed minus reference speed.
    pub speed: Summary,
    pub lateral: Summary,
    pub sections: Vec<SectionMetrics>,
}

impl TrackingMetrics {
    /// `rows` holds (section, speed error, lateral error) per record.
    pub fn from_rows(rows: &[(u32, f64, f64)], section_ids: &[u32]) -> Self {
        let speed: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let lateral: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let sections = section_ids
            .iter()
            .map(|&id| {
                let (sp, lat): (Vec<f64>, Vec<f64>) =
                    rows.iter().filter(|r| r.0 == id).map(|r| (r.1, r.2)).unzip();
                SectionMetrics {
                    id,
                    speed: Summary::of(&sp),
                    lateral: Summary::of(&lat),
                }
            })
            .collect();
        Self {
            speed: Summary::of(&speed),
            lateral: Summary::of(&lateral),
            sections,
        }
    }

    pub fn section(&self, id: u32) -> Option<&SectionMetrics> {
        self.sections.iter().find(|s| s.id == id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn definitions() {
        let s = Summary::of(&[0.3, -0.3]);
        assert_eq!(s.mean, 0.0);
        assert!((s.rms - 0.3).abs() < 1e-15);
        assert!((s.std - 0.3).abs() < 1e-15);
        assert_eq!(s.max, 0.3);
        assert_eq!(Summary::of(&[1.0, -2.0, 1.5]).max, -2.0);
        assert_eq!(Summary::of(&[]).count, 0);
    }

    #[test]
    fn rms_decomposes() {
        let v: Vec<f64> = (0..500).map(|i| (i as f64 * 0.37).sin() * 2.0 + 0.4).collect();
        let s = Summary::of(&v);
        assert!((s.rms * s.rms - s.mean * s.mean - s.std * s.std).abs() < 1e-9);
        assert!(s.max.abs() >= s.rms);
    }

    #[test]
    fn per_section_split() {
        let rows = [(1, 0.1, 0.5), (1, -0.1, -0.5), (2, 1.0, 2.0)];
        let m = TrackingMetrics::from_rows(&rows, &[1, 2, 3]);
        assert_eq!(m.section(1).unwrap().lateral.rms, 0.5);
        assert_eq!(m.section(2).unwrap().lateral.max, 2.0);
        assert_eq!(m.section(3).unwrap().lateral.count, 0);
        assert_eq!(m.lateral.count, 3);
    }
}
