//! Binary field files and norm-report CSV.
//!
//! Field layout (little endian): `u32 d`, `u32 n`, `f64 L`, then `n^d` `f64`
//! samples in row-major order.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{GridSpec, NormEntry, NormReport, RealField};
use crate::error::{MuskatError, Result};

pub fn write_field<W: Write>(mut out: W, field: &RealField) -> Result<()> {
    let g = field.grid();
    out.write_all(&(g.dim() as u32).to_le_bytes())?;
    out.write_all(&(g.n() as u32).to_le_bytes())?;
    out.write_all(&g.length().to_le_bytes())?;
    for v in field.samples() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_field<R: Read>(mut input: R) -> Result<RealField> {
    let mut u = [0u8; 4];
    let mut f = [0u8; 8];
    input.read_exact(&mut u)?;
    let d = u32::from_le_bytes(u) as usize;
    input.read_exact(&mut u)?;
    let n = u32::from_le_bytes(u) as usize;
    input.read_exact(&mut f)?;
    let length = f64::from_le_bytes(f);
    let grid = GridSpec::new(d, n, length)?;
    let mut samples = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        input.read_exact(&mut f)?;
        samples.push(f64::from_le_bytes(f));
    }
    let mut rest = Vec::new();
    input.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(MuskatError::parse(format!(
            "{} trailing bytes after field samples",
            rest.len()
        )));
    }
    RealField::new(grid, samples)
}

/// Writes `s,norm,besov_sup` rows.
pub fn write_norm_report_csv(path: &Path, report: &NormReport) -> Result<()> {
    let mut out = fs::File::create(path)?;
    writeln!(out, "s,norm,besov_sup")?;
    for e in &report.entries {
        writeln!(out, "{},{:.12e},{:.12e}", e.s, e.norm, e.besov_sup)?;
    }
    Ok(())
}

/// Reads the scalar columns back; annulus profiles are not stored.
pub fn read_norm_report_csv(path: &Path) -> Result<NormReport> {
    let file = fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != "s,norm,besov_sup" {
        return Err(MuskatError::Parse {
            path: Some(path.to_path_buf()),
            message: format!("unexpected header '{header}'"),
        });
    }
    let mut entries = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| MuskatError::Parse {
                path: Some(path.to_path_buf()),
                message: format!("line {}: {e}", lineno + 2),
            })?;
        if cols.len() != 3 {
            return Err(MuskatError::Parse {
                path: Some(path.to_path_buf()),
                message: format!("line {}: expected 3 columns", lineno + 2),
            });
        }
        entries.push(NormEntry {
            s: cols[0],
            norm: cols[1],
            besov_sup: cols[2],
            besov_profile: Default::default(),
        });
    }
    Ok(NormReport { entries })
}
