//! Little-endian binary field snapshots.
//!
//! Layout: `"INLS"`, u32 version, u8 grid kind (0 radial, 1 Cartesian),
//! u32 n, u32 l, u32 N (or per-axis M), f64 r_max (or L), then `l·N`
//! `(re, im)` f64 pairs, component-major.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{CartesianGrid, Field, Grid, RadialGrid};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"INLS";
pub const VERSION: u32 = 1;

const KIND_RADIAL: u8 = 0;
const KIND_CARTESIAN: u8 = 1;

pub fn encode(field: &Field, out: &mut impl Write) -> Result<()> {
    let (kind, n, count, extent) = match field.grid() {
        Grid::Radial(g) => (KIND_RADIAL, g.n(), g.len(), g.r_max()),
        Grid::Cartesian(g) => (KIND_CARTESIAN, g.n(), g.points_per_axis(), g.half_width()),
    };
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&[kind])?;
    for v in [n, field.l(), count] {
        let v = u32::try_from(v).map_err(|_| Error::Snapshot(format!("{v} exceeds u32")))?;
        out.write_all(&v.to_le_bytes())?;
    }
    out.write_all(&extent.to_le_bytes())?;
    for z in field.components().iter().flatten() {
        out.write_all(&z.re.to_le_bytes())?;
        out.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn decode(input: &mut impl Read) -> Result<Field> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let version = read_u32(input)?;
    if version != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let mut kind = [0u8; 1];
    input.read_exact(&mut kind)?;
    let n = read_u32(input)? as usize;
    let l = read_u32(input)? as usize;
    let count = read_u32(input)? as usize;
    let extent = read_f64(input)?;
    let grid: Grid = match kind[0] {
        KIND_RADIAL => RadialGrid::new(n, count, extent)?.into(),
        KIND_CARTESIAN => CartesianGrid::new(n, count, extent)?.into(),
        other => return Err(Error::Snapshot(format!("unknown grid kind {other}"))),
    };
    let len = grid.len();
    let mut components = Vec::with_capacity(l);
    for _ in 0..l {
        let mut c = Vec::with_capacity(len);
        for _ in 0..len {
            let re = read_f64(input)?;
            let im = read_f64(input)?;
            c.push(Complex64::new(re, im));
        }
        components.push(c);
    }
    Field::new(grid, components)
}

/// Writes through a sibling temporary file and renames it into place, so
/// readers never observe a partial snapshot.
pub fn write(path: &Path, field: &Field) -> Result<()> {
    let name =
        path.file_name().ok_or_else(|| Error::Snapshot(format!("{} has no file name", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut w = BufWriter::new(File::create(&tmp)?);
        encode(field, &mut w)?;
        let file = w.into_inner().map_err(|e| e.into_error())?;
        file.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub fn read(path: &Path) -> Result<Field> {
    decode(&mut BufReader::new(File::open(path)?))
}

fn read_u32(input: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    input.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64(input: &mut impl Read) -> Result<f64> {
    let mut buf = [0u8; 8];
    input.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}
