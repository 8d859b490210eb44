//! Binary checkpoint format.
//!
//! Layout, all little-endian:
//!   magic bytes `AXRG`,
//!   format version (u32),
//!   n_r, n_z, r_max, z_half, t (five f64),
//!   row-major f64 arrays for u_r, u_theta, u_z, pressure.
//!
//! Vorticity is derived data and is reconstructed on load.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::Field2D;
use crate::grid::CylGrid;
use crate::state::AxisymState;

pub const MAGIC: &[u8; 4] = b"AXRG";
pub const FORMAT_VERSION: u32 = 1;

pub fn write_checkpoint(path: &Path, state: &AxisymState) -> Result<()> {
    let grid = state.grid();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    for v in [
        grid.n_r() as f64,
        grid.n_z() as f64,
        grid.r_max(),
        grid.z_half(),
        state.t,
    ] {
        w.write_all(&v.to_le_bytes())?;
    }
    for field in [&state.u_r, &state.u_theta, &state.u_z, &state.pressure] {
        for v in field.values() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<AxisymState> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Checkpoint(format!(
            "bad magic {magic:?}, expected {MAGIC:?}"
        )));
    }
    let mut ver = [0u8; 4];
    r.read_exact(&mut ver)?;
    let version = u32::from_le_bytes(ver);
    if version != FORMAT_VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported format version {version}"
        )));
    }
    let mut header = [0.0f64; 5];
    for h in header.iter_mut() {
        let mut buf = [0u8; 8];
        r.read_exact(&mut buf)?;
        *h = f64::from_le_bytes(buf);
    }
    let [n_r_f, n_z_f, r_max, z_half, t] = header;
    let n_r = as_count(n_r_f, "n_r")?;
    let n_z = as_count(n_z_f, "n_z")?;
    let grid = CylGrid::shared(r_max, z_half, n_r, n_z)?;

    let mut read_field = || -> Result<Field2D> {
        let mut values = vec![0.0f64; grid.len()];
        let mut buf = [0u8; 8];
        for v in values.iter_mut() {
            r.read_exact(&mut buf)?;
            *v = f64::from_le_bytes(buf);
        }
        Field2D::from_values(&grid, values)
    };
    let u_r = read_field()?;
    let u_theta = read_field()?;
    let u_z = read_field()?;
    let pressure = read_field()?;
    AxisymState::from_velocity(t, u_r, u_theta, u_z, pressure)
}

fn as_count(v: f64, what: &str) -> Result<usize> {
    if v.is_finite() && v >= 8.0 && v.fract() == 0.0 && v < 1e9 {
        Ok(v as usize)
    } else {
        Err(Error::Checkpoint(format!("invalid node count {what} = {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::CylGrid;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = CylGrid::shared(3.0, 2.0, 24, 16).unwrap();
        let u_t = Field2D::from_fn(&g, |r, z| r * (-(r * r + z * z)).exp()).unwrap();
        let u_r = Field2D::from_fn(&g, |r, z| r * z * (-(r * r + z * z)).exp()).unwrap();
        let u_z = Field2D::from_fn(&g, |r, z| (1.0 - r) * (-(z * z)).exp() * 0.1).unwrap();
        let p = Field2D::from_fn(&g, |r, z| (-(r * r + z * z)).exp()).unwrap();
        let state = AxisymState::from_velocity(0.375, u_r, u_t, u_z, p).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.axrg");
        write_checkpoint(&path, &state).unwrap();
        let back = read_checkpoint(&path).unwrap();
        assert_eq!(back.t, state.t);
        assert_eq!(back.u_r.values(), state.u_r.values());
        assert_eq!(back.u_theta.values(), state.u_theta.values());
        assert_eq!(back.u_z.values(), state.u_z.values());
        assert_eq!(back.pressure.values(), state.pressure.values());
    }

    #[test]
    fn rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.axrg");
        std::fs::write(&path, b"NOPE then some garbage bytes").unwrap();
        assert!(matches!(
            read_checkpoint(&path),
            Err(Error::Checkpoint(_))
        ));
    }
}
