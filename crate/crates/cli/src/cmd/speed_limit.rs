use anyhow::Result;
use vdl_core::tracking::kinematic_speed_limit;
use vdl_core::Error;

use super::EXIT_OK;

#[derive(clap::Args)]
pub struct Args {
    /// Curve radii in metres; repeat or comma-separate.
    #[arg(long = "r", required = true, value_delimiter = ',', allow_negative_numbers = true)]
    radii: Vec<f64>,
    /// Friction coefficient.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Gravitational acceleration (m/s^2).
    #[arg(long, default_value_t = 9.81)]
    g: f64,
}

pub fn table(radii: &[f64], mu: f64, g: f64) -> Result<String> {
    if !(mu.is_finite() && mu > 0.0 && g.is_finite() && g > 0.0) {
        return Err(Error::Config(format!("mu and g must be positive, got {mu} and {g}")).into());
    }
    let mut out = String::from("radius_m,speed_limit_mps\n");
    for &r in radii {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Config(format!("radius must be positive, got {r}")).into());
        }
        out.push_str(&format!("{r},{:.2}\n", kinematic_speed_limit(r, mu, g)));
    }
    Ok(out)
}

pub fn run(a: Args) -> Result<u8> {
    print!("{}", table(&a.radii, a.mu, a.g)?);
    Ok(EXIT_OK)
}
