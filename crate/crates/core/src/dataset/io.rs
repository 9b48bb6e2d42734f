//! `VDL1` binary dataset container and CSV export.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic        4 bytes  "VDL1"
//! version      u32      1
//! n            u64      instance count
//! train        u64      training instances (the first `train` records)
//! test         u64
//! master_seed  u64
//! rejections   u64      re-drawn instances
//! dt           f64      integrator step (s)
//! sample_dt    f64      trajectory sampling step (s)
//! horizon      f64      rollout duration (s)
//! samples      u32      points per trajectory
//! params_hash  32 bytes SHA-256 of the canonical vehicle parameter text
//! records      n x (14 state + 5 control + 2*samples trajectory) f64
//! digest       32 bytes SHA-256 of everything above
//! ```

use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{Dataset, DatasetInstance};
use crate::error::{Error, Result};
use crate::fsutil;
use crate::vehicle::{ControlInput, VehicleState, STATE_DIM};

pub const MAGIC: &[u8; 4] = b"VDL1";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 8 * 5 + 8 * 3 + 4 + 32;

pub fn record_len(samples: usize) -> usize {
    STATE_DIM + 5 + 2 * samples
}

pub fn encode(ds: &Dataset) -> Vec<u8> {
    let samples = ds.samples_per_trajectory();
    let mut buf = Vec::with_capacity(HEADER_LEN + ds.len() * record_len(samples) * 8 + 32);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(ds.len() as u64).to_le_bytes());
    buf.extend_from_slice(&(ds.train_len() as u64).to_le_bytes());
    buf.extend_from_slice(&(ds.test_len() as u64).to_le_bytes());
    buf.extend_from_slice(&ds.master_seed.to_le_bytes());
    buf.extend_from_slice(&ds.rejections.to_le_bytes());
    buf.extend_from_slice(&ds.dt.to_le_bytes());
    buf.extend_from_slice(&ds.sample_dt.to_le_bytes());
    buf.extend_from_slice(&ds.horizon.to_le_bytes());
    buf.extend_from_slice(&(samples as u32).to_le_bytes());
    buf.extend_from_slice(&ds.params_hash);
    for inst in &ds.instances {
        for v in inst.xi0.to_array() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        for v in inst.u.to_array() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        for &(x, _) in &inst.trajectory {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        for &(_, y) in &inst.trajectory {
            buf.extend_from_slice(&y.to_le_bytes());
        }
    }
    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    buf
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(Error::Format("dataset file truncated".into()));
        }
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn decode(bytes: &[u8]) -> Result<Dataset> {
    if bytes.len() < HEADER_LEN + 32 {
        return Err(Error::Format("dataset file too short".into()));
    }
    let (body, digest) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(body).as_slice() != digest {
        return Err(Error::Format("dataset digest mismatch".into()));
    }
    let mut r = Reader { bytes: body, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Format("not a VDL1 dataset (bad magic)".into()));
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported dataset version {version}")));
    }
    let n = r.u64()? as usize;
    let train = r.u64()? as usize;
    let test = r.u64()? as usize;
    if train + test != n {
        return Err(Error::Format(format!("split {train}+{test} does not add up to {n}")));
    }
    let master_seed = r.u64()?;
    let rejections = r.u64()?;
    let dt = r.f64()?;
    let sample_dt = r.f64()?;
    let horizon = r.f64()?;
    let samples = r.u32()? as usize;
    let params_hash: [u8; 32] = r.take(32)?.try_into().unwrap();
    let expected = HEADER_LEN + n * record_len(samples) * 8;
    if body.len() != expected {
        return Err(Error::Format(format!(
            "dataset body is {} bytes, expected {expected}",
            body.len()
        )));
    }
    let mut instances = Vec::with_capacity(n);
    for _ in 0..n {
        let mut s = [0.0; STATE_DIM];
        for v in s.iter_mut() {
            *v = r.f64()?;
        }
        let mut u = [0.0; 5];
        for v in u.iter_mut() {
            *v = r.f64()?;
        }
        let xs: Vec<f64> = (0..samples).map(|_| r.f64()).collect::<Result<_>>()?;
        let ys: Vec<f64> = (0..samples).map(|_| r.f64()).collect::<Result<_>>()?;
        instances.push(DatasetInstance {
            xi0: VehicleState::from_array(&s),
            u: ControlInput::from_array(&u),
            trajectory: xs.into_iter().zip(ys).collect(),
        });
    }
    Ok(Dataset {
        instances,
        split_index: train,
        master_seed,
        rejections,
        dt,
        sample_dt,
        horizon,
        params_hash,
    })
}

pub fn save(ds: &Dataset, path: &Path) -> Result<()> {
    fsutil::atomic_write(path, &encode(ds))
}

pub fn load(path: &Path) -> Result<Dataset> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

const STATE_NAMES: [&str; STATE_DIM] = [
    "X0", "Y0", "psi0", "theta0", "phi0", "Vx0", "Vy0", "psi_dot0", "theta_dot0", "phi_dot0",
    "omega_fl0", "omega_fr0", "omega_rl0", "omega_rr0",
];

/// One row per instance: index, split, initial state, control, then the
/// trajectory as X samples followed by Y samples.
pub fn write_csv<W: Write>(ds: &Dataset, mut w: W) -> std::io::Result<()> {
    let samples = ds.samples_per_trajectory();
    let mut header: Vec<String> = vec!["index".into(), "split".into()];
    header.extend(STATE_NAMES.iter().map(|s| s.to_string()));
    header.extend(["T_fl", "T_fr", "T_rl", "T_rr", "delta"].map(String::from));
    header.extend((0..samples).map(|k| format!("X{k}")));
    header.extend((0..samples).map(|k| format!("Y{k}")));
    writeln!(w, "{}", header.join(","))?;
    for (i, inst) in ds.instances.iter().enumerate() {
        let split = if i < ds.split_index { "train" } else { "test" };
        let mut fields: Vec<String> = vec![i.to_string(), split.to_string()];
        fields.extend(inst.xi0.to_array().iter().map(|v| format!("{v:?}")));
        fields.extend(inst.u.to_array().iter().map(|v| format!("{v:?}")));
        fields.extend(inst.trajectory.iter().map(|p| format!("{:?}", p.0)));
        fields.extend(inst.trajectory.iter().map(|p| format!("{:?}", p.1)));
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn save_csv(ds: &Dataset, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_csv(ds, &mut buf).map_err(|e| Error::io(path, e))?;
    fsutil::atomic_write(path, &buf)
}
