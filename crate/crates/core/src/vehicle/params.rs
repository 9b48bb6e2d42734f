use std::path::Path;

use crate::error::{Error, Result};
use crate::fsutil;
use crate::kvconfig::KvFile;

/// Shipped default parameter file.
pub const DEFAULT_PARAMS_FILE: &str = include_str!("../../../../configs/vehicle.params");

/// Coefficients of the simplified combined-slip Magic Formula.
///
/// Pure slip: `F = D sin(C atan(B s - E (B s - atan(B s))))` with `D = mu Fz`.
/// Combined slip weights: `G_xa = cos(c_xa atan(b_xa alpha))` on the
/// longitudinal force, `G_yk = cos(c_yk atan(b_yk tau))` on the lateral one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TireCoeffs {
    pub b_x: f64,
    pub c_x: f64,
    pub e_x: f64,
    pub b_y: f64,
    pub c_y: f64,
    pub e_y: f64,
    pub b_xa: f64,
    pub c_xa: f64,
    pub b_yk: f64,
    pub c_yk: f64,
}

impl Default for TireCoeffs {
    fn default() -> Self {
        Self {
            b_x: 10.0,
            c_x: 1.9,
            e_x: 0.97,
            b_y: 8.5,
            c_y: 1.3,
            e_y: -1.0,
            b_xa: 12.0,
            c_xa: 1.0,
            b_yk: 10.0,
            c_yk: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleParams {
    /// Total mass (kg).
    pub m_t: f64,
    /// Roll, pitch and yaw inertias (kg m^2).
    pub i_x: f64,
    pub i_y: f64,
    pub i_z: f64,
    /// Wheel inertia (kg m^2).
    pub i_r: f64,
    /// CoG to front / rear axle (m).
    pub l_f: f64,
    pub l_r: f64,
    /// Half-track (m).
    pub l_w: f64,
    /// CoG height (m).
    pub h: f64,
    pub r_eff: f64,
    /// Suspension stiffness (N/m) and damping (N s/m).
    pub k_s: f64,
    pub d_s: f64,
    pub rho_air: f64,
    /// Aerodynamic drag coefficient.
    pub c_x: f64,
    /// Frontal area (m^2).
    pub frontal_area: f64,
    pub mu: f64,
    pub g: f64,
    pub tire: TireCoeffs,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            m_t: 1500.0,
            i_x: 550.0,
            i_y: 2000.0,
            i_z: 2500.0,
            i_r: 1.2,
            l_f: 1.2,
            l_r: 1.4,
            l_w: 0.8,
            h: 0.5,
            r_eff: 0.3,
            k_s: 30000.0,
            d_s: 3000.0,
            rho_air: 1.225,
            c_x: 0.3,
            frontal_area: 2.2,
            mu: 1.0,
            g: 9.81,
            tire: TireCoeffs::default(),
        }
    }
}

macro_rules! param_keys {
    ($($key:literal => $($field:ident).+),* $(,)?) => {
        pub const PARAM_KEYS: &[&str] = &[$($key),*];

        fn apply(params: &mut VehicleParams, kv: &KvFile) -> Result<()> {
            $(
                if let Some(v) = kv.parse_value::<f64>($key)? {
                    params.$($field).+ = v;
                }
            )*
            Ok(())
        }

        fn pairs(params: &VehicleParams) -> Vec<(&'static str, f64)> {
            vec![$(($key, params.$($field).+)),*]
        }
    };
}

param_keys! {
    "m_t" => m_t,
    "i_x" => i_x,
    "i_y" => i_y,
    "i_z" => i_z,
    "i_r" => i_r,
    "l_f" => l_f,
    "l_r" => l_r,
    "l_w" => l_w,
    "h" => h,
    "r_eff" => r_eff,
    "k_s" => k_s,
    "d_s" => d_s,
    "rho_air" => rho_air,
    "c_x" => c_x,
    "s" => frontal_area,
    "mu" => mu,
    "g" => g,
    "tire.b_x" => tire.b_x,
    "tire.c_x" => tire.c_x,
    "tire.e_x" => tire.e_x,
    "tire.b_y" => tire.b_y,
    "tire.c_y" => tire.c_y,
    "tire.e_y" => tire.e_y,
    "tire.b_xa" => tire.b_xa,
    "tire.c_xa" => tire.c_xa,
    "tire.b_yk" => tire.b_yk,
    "tire.c_yk" => tire.c_yk,
}

impl VehicleParams {
    /// Parses a parameter file. Keys absent from the file keep their default
    /// value; unknown keys are rejected.
    pub fn from_kv_text(text: &str) -> Result<Self> {
        let kv = KvFile::parse(text)?;
        Self::from_kv(&kv)
    }

    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        kv.reject_unknown(PARAM_KEYS)?;
        let mut params = Self::default();
        apply(&mut params, kv)?;
        params.validate()?;
        Ok(params)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_kv_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("m_t", self.m_t),
            ("i_x", self.i_x),
            ("i_y", self.i_y),
            ("i_z", self.i_z),
            ("i_r", self.i_r),
            ("l_f", self.l_f),
            ("l_r", self.l_r),
            ("l_w", self.l_w),
            ("h", self.h),
            ("r_eff", self.r_eff),
            ("g", self.g),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.mu > 0.0 && self.mu <= 2.0) {
            return Err(Error::Config(format!("mu must lie in (0, 2], got {}", self.mu)));
        }
        let non_negative = [
            ("k_s", self.k_s),
            ("d_s", self.d_s),
            ("rho_air", self.rho_air),
            ("c_x", self.c_x),
            ("s", self.frontal_area),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(())
    }

    /// Canonical text form: every key, in a fixed order, with shortest
    /// round-trip float formatting.
    pub fn canonical_text(&self) -> String {
        pairs(self)
            .into_iter()
            .map(|(k, v)| format!("{k} = {v:?}\n"))
            .collect()
    }

    pub fn hash(&self) -> [u8; 32] {
        use sha2::{Digest, Sha256};
        Sha256::digest(self.canonical_text().as_bytes()).into()
    }

    pub fn hash_hex(&self) -> String {
        fsutil::sha256_hex(self.canonical_text().as_bytes())
    }

    pub fn wheelbase(&self) -> f64 {
        self.l_f + self.l_r
    }

    /// Static normal load per wheel, ordered fl, fr, rl, rr.
    pub fn static_loads(&self) -> [f64; 4] {
        let w = self.m_t * self.g / (2.0 * self.wheelbase());
        let front = w * self.l_r;
        let rear = w * self.l_f;
        [front, front, rear, rear]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_file_matches_defaults() {
        let p = VehicleParams::from_kv_text(DEFAULT_PARAMS_FILE).unwrap();
        assert_eq!(p, VehicleParams::default());
    }

    #[test]
    fn canonical_text_round_trips() {
        let mut p = VehicleParams::default();
        p.mu = 0.7;
        p.tire.b_y = 7.25;
        let q = VehicleParams::from_kv_text(&p.canonical_text()).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.hash(), q.hash());
        assert_ne!(p.hash(), VehicleParams::default().hash());
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(VehicleParams::from_kv_text("wheel_count = 4\n").is_err());
        assert!(VehicleParams::from_kv_text("mu = 0\n").is_err());
        assert!(VehicleParams::from_kv_text("mu = 2.5\n").is_err());
        assert!(VehicleParams::from_kv_text("m_t = -1\n").is_err());
        assert!(VehicleParams::from_kv_text("mu = 2\n").is_ok());
    }

    #[test]
    fn static_loads_sum_to_weight() {
        let p = VehicleParams::default();
        let loads = p.static_loads();
        assert!((loads.iter().sum::<f64>() - p.m_t * p.g).abs() < 1e-9);
        assert!((loads[0] - p.m_t * p.g * p.l_r / (2.0 * (p.l_f + p.l_r))).abs() < 1e-9);
    }
}
