//! On-disk formats.
//!
//! Field dump (`.rvmf`): magic "RVMF", version u32, dims 3×u32, box length
//! f64, time f64, then little-endian f64 arrays in row-major x-fastest order,
//! components E₁ E₂ E₃ B₁ B₂ B₃ concatenated.
//!
//! Ensemble checkpoint (`.rvmp`): magic "RVMP", version u32, particle count
//! u64, time f64, then the x block (count × 3 doubles, particle-major), the
//! v block (same shape), and the w block (count doubles), all little-endian.

use crate::error::{Error, Result};
use crate::maxwell::state::{Grid, RealFields};
use crate::particles::ensemble::ParticleEnsemble;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const FIELD_MAGIC: &[u8; 4] = b"RVMF";
pub const ENSEMBLE_MAGIC: &[u8; 4] = b"RVMP";
pub const FORMAT_VERSION: u32 = 1;

pub fn write_field_dump(
    path: &Path,
    grid: Grid,
    time: f64,
    fields: &RealFields,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(FIELD_MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    for _ in 0..3 {
        w.write_all(&(grid.n as u32).to_le_bytes())?;
    }
    w.write_all(&grid.length.to_le_bytes())?;
    w.write_all(&time.to_le_bytes())?;
    for comp in fields.e.iter().chain(fields.b.iter()) {
        for v in comp {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub struct FieldDump {
    pub grid: Grid,
    pub time: f64,
    pub fields: RealFields,
}

pub fn read_field_dump(path: &Path) -> Result<FieldDump> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != FIELD_MAGIC {
        return Err(Error::BadFormat(format!(
            "field dump magic {:?} (expected RVMF)",
            magic
        )));
    }
    let version = read_u32(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(Error::BadFormat(format!("unsupported version {version}")));
    }
    let nx = read_u32(&mut r)? as usize;
    let ny = read_u32(&mut r)? as usize;
    let nz = read_u32(&mut r)? as usize;
    if nx != ny || ny != nz || !nx.is_power_of_two() {
        return Err(Error::BadFormat(format!(
            "dims ({nx},{ny},{nz}) not a power-of-two cube"
        )));
    }
    let length = read_f64(&mut r)?;
    let time = read_f64(&mut r)?;
    let grid = Grid::new(nx, length);
    let read_comp = |r: &mut BufReader<File>| -> Result<Vec<f64>> {
        let mut out = vec![0.0; grid.cells()];
        for v in out.iter_mut() {
            *v = read_f64(r)?;
        }
        Ok(out)
    };
    let fields = RealFields {
        e: [read_comp(&mut r)?, read_comp(&mut r)?, read_comp(&mut r)?],
        b: [read_comp(&mut r)?, read_comp(&mut r)?, read_comp(&mut r)?],
    };
    Ok(FieldDump { grid, time, fields })
}

pub fn write_ensemble_checkpoint(path: &Path, e: &ParticleEnsemble, time: f64) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(ENSEMBLE_MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(e.len() as u64).to_le_bytes())?;
    w.write_all(&time.to_le_bytes())?;
    for x in &e.x {
        for c in x {
            w.write_all(&c.to_le_bytes())?;
        }
    }
    for v in &e.v {
        for c in v {
            w.write_all(&c.to_le_bytes())?;
        }
    }
    for weight in &e.w {
        w.write_all(&weight.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub struct EnsembleCheckpoint {
    pub time: f64,
    pub ensemble: ParticleEnsemble,
}

pub fn read_ensemble_checkpoint(path: &Path, box_length: f64) -> Result<EnsembleCheckpoint> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != ENSEMBLE_MAGIC {
        return Err(Error::BadFormat(format!(
            "ensemble magic {:?} (expected RVMP)",
            magic
        )));
    }
    let version = read_u32(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(Error::BadFormat(format!("unsupported version {version}")));
    }
    let count = read_u64(&mut r)? as usize;
    let time = read_f64(&mut r)?;
    let mut ensemble = ParticleEnsemble::empty(box_length);
    for _ in 0..count {
        ensemble
            .x
            .push([read_f64(&mut r)?, read_f64(&mut r)?, read_f64(&mut r)?]);
    }
    for _ in 0..count {
        ensemble
            .v
            .push([read_f64(&mut r)?, read_f64(&mut r)?, read_f64(&mut r)?]);
    }
    for _ in 0..count {
        ensemble.w.push(read_f64(&mut r)?);
    }
    Ok(EnsembleCheckpoint { time, ensemble })
}

/// Dump header summary for `dump-info`.
pub fn describe_dump(path: &Path) -> Result<String> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    match &magic {
        m if m == FIELD_MAGIC => {
            let version = read_u32(&mut r)?;
            let nx = read_u32(&mut r)?;
            let ny = read_u32(&mut r)?;
            let nz = read_u32(&mut r)?;
            let length = read_f64(&mut r)?;
            let time = read_f64(&mut r)?;
            Ok(format!(
                "field dump (RVMF v{version}): dims {nx}x{ny}x{nz}, box length {length}, time {time}"
            ))
        }
        m if m == ENSEMBLE_MAGIC => {
            let version = read_u32(&mut r)?;
            let count = read_u64(&mut r)?;
            let time = read_f64(&mut r)?;
            Ok(format!(
                "ensemble checkpoint (RVMP v{version}): {count} particles, time {time}"
            ))
        }
        m => Err(Error::BadFormat(format!("unknown magic {m:?}"))),
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
