//! File formats shared with the plotting scripts.
//!
//! CSV files carry a header row. Paths are `t,value` in one dimension and
//! long-format `x,y,value` (row-major) in two. Binary files are little-endian:
//!
//! * samples: `LVYSAMP1`, u64 count, f64 values;
//! * paths: `LVYPATH1`, u64 dim, u64 n, u64 m, f64 step, f64 values
//!   in row-major order.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::exponent::LevyExponent;
use crate::synth::{GridSpec, PathGrid};
use crate::verify::ScalingReport;

const SAMPLES_MAGIC: &[u8; 8] = b"LVYSAMP1";
const PATH_MAGIC: &[u8; 8] = b"LVYPATH1";

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}

fn parse(field: &str, line: u64) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Format(format!("line {line}: `{field}` is not a number")))
}

fn read_columns<R: Read>(r: R, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let got: Vec<String> = rdr.headers().map_err(csv_error)?.iter().map(str::to_owned).collect();
    if got != header {
        return Err(Error::Format(format!(
            "expected header {}, got {}",
            header.join(","),
            got.join(",")
        )));
    }
    let mut cols = vec![Vec::new(); header.len()];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let line = i as u64 + 2;
        for (c, field) in rec.iter().enumerate() {
            cols[c].push(parse(field, line)?);
        }
    }
    Ok(cols)
}

/// `xi,psi` table of the exponent on the given grid.
pub fn write_exponent_csv<W: Write>(w: W, exponent: &LevyExponent, xi_grid: &[f64]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["xi", "psi"]).map_err(csv_error)?;
    for &xi in xi_grid {
        wtr.write_record([fmt(xi), fmt(exponent.psi(xi)?)]).map_err(csv_error)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_exponent_csv<R: Read>(r: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut cols = read_columns(r, &["xi", "psi"])?;
    let psi = cols.pop().unwrap();
    Ok((cols.pop().unwrap(), psi))
}

pub fn write_samples_csv<W: Write>(w: W, samples: &[f64]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["value"]).map_err(csv_error)?;
    for &x in samples {
        wtr.write_record([fmt(x)]).map_err(csv_error)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_samples_csv<R: Read>(r: R) -> Result<Vec<f64>> {
    Ok(read_columns(r, &["value"])?.pop().unwrap())
}

pub fn write_samples_bin<W: Write>(mut w: W, samples: &[f64]) -> Result<()> {
    w.write_all(SAMPLES_MAGIC)?;
    w.write_all(&(samples.len() as u64).to_le_bytes())?;
    write_f64s(&mut w, samples)?;
    w.flush()?;
    Ok(())
}

pub fn read_samples_bin<R: Read>(mut r: R) -> Result<Vec<f64>> {
    expect_magic(&mut r, SAMPLES_MAGIC)?;
    let n = read_u64(&mut r)? as usize;
    read_f64s(&mut r, n)
}

pub fn write_path_csv<W: Write>(w: W, path: &PathGrid) -> Result<()> {
    let g = path.grid;
    let mut wtr = csv::Writer::from_writer(w);
    if g.dim == 1 {
        wtr.write_record(["t", "value"]).map_err(csv_error)?;
        for (k, &v) in path.values.iter().enumerate() {
            wtr.write_record([fmt(g.coord(k)), fmt(v)]).map_err(csv_error)?;
        }
    } else {
        wtr.write_record(["x", "y", "value"]).map_err(csv_error)?;
        for i in 0..g.n {
            for j in 0..g.m {
                wtr.write_record([fmt(g.coord(i)), fmt(g.coord(j)), fmt(path.get(i, j))])
                    .map_err(csv_error)?;
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a path CSV back into its grid and row-major values. The step is
/// taken from the first two coordinates.
pub fn read_path_csv<R: Read>(mut r: R) -> Result<(GridSpec, Vec<f64>)> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let header = text.lines().next().unwrap_or("").trim();
    if header == "t,value" {
        let cols = read_columns(text.as_bytes(), &["t", "value"])?;
        if cols[0].len() < 2 {
            return Err(Error::Format("path needs at least 2 rows".into()));
        }
        let grid = GridSpec::line(cols[0][1] - cols[0][0], cols[0].len())?;
        Ok((grid, cols[1].clone()))
    } else {
        let cols = read_columns(text.as_bytes(), &["x", "y", "value"])?;
        let len = cols[0].len();
        let m = cols[0].iter().take_while(|&&x| x == cols[0][0]).count();
        if m < 2 || len % m != 0 {
            return Err(Error::Format("sheet rows are not a full rectangle".into()));
        }
        let grid = GridSpec::plane(cols[1][1] - cols[1][0], len / m, m)?;
        Ok((grid, cols[2].clone()))
    }
}

pub fn write_path_bin<W: Write>(mut w: W, path: &PathGrid) -> Result<()> {
    let g = path.grid;
    w.write_all(PATH_MAGIC)?;
    for x in [g.dim as u64, g.n as u64, g.m as u64] {
        w.write_all(&x.to_le_bytes())?;
    }
    w.write_all(&g.step.to_le_bytes())?;
    write_f64s(&mut w, &path.values)?;
    w.flush()?;
    Ok(())
}

pub fn read_path_bin<R: Read>(mut r: R) -> Result<(GridSpec, Vec<f64>)> {
    expect_magic(&mut r, PATH_MAGIC)?;
    let dim = read_u64(&mut r)? as usize;
    let n = read_u64(&mut r)? as usize;
    let m = read_u64(&mut r)? as usize;
    let step = f64::from_bits(read_u64(&mut r)?);
    let grid = GridSpec { dim, step, n, m };
    grid.validate()?;
    let values = read_f64s(&mut r, grid.len())?;
    Ok((grid, values))
}

pub fn write_report_json<W: Write>(w: W, report: &ScalingReport) -> Result<()> {
    serde_json::to_writer_pretty(w, report).map_err(|e| Error::Format(e.to_string()))
}

pub fn read_report_json<R: Read>(r: R) -> Result<ScalingReport> {
    serde_json::from_reader(r).map_err(|e| Error::Format(e.to_string()))
}

fn write_f64s<W: Write>(w: &mut W, xs: &[f64]) -> Result<()> {
    let mut buf = Vec::with_capacity(8 * xs.len());
    for x in xs {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_f64s<R: Read>(r: &mut R, n: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; 8 * n];
    r.read_exact(&mut buf)
        .map_err(|_| Error::Format(format!("expected {n} values, file is truncated")))?;
    Ok(buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)
        .map_err(|_| Error::Format("truncated header".into()))?;
    Ok(u64::from_le_bytes(b))
}

fn expect_magic<R: Read>(r: &mut R, magic: &[u8; 8]) -> Result<()> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)
        .map_err(|_| Error::Format("file too short".into()))?;
    if &b != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {}",
            String::from_utf8_lossy(&b),
            String::from_utf8_lossy(magic)
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::NoiseSpec;
    use crate::synth::{Operator, Synthesizer};

    fn path(grid: GridSpec, op: Operator) -> PathGrid {
        let noise = NoiseSpec::new(LevyExponent::cauchy(1.0).unwrap(), 5);
        Synthesizer::new(&noise, op, grid).unwrap().path(0)
    }

    #[test]
    fn samples_round_trip() {
        let xs = vec![0.0, -1.5, 1e-300, 3.0e17, f64::MIN_POSITIVE];
        let mut csv = Vec::new();
        write_samples_csv(&mut csv, &xs).unwrap();
        assert_eq!(read_samples_csv(csv.as_slice()).unwrap(), xs);
        let mut bin = Vec::new();
        write_samples_bin(&mut bin, &xs).unwrap();
        assert_eq!(bin.len(), 16 + 8 * xs.len());
        assert_eq!(read_samples_bin(bin.as_slice()).unwrap(), xs);
    }

    #[test]
    fn line_path_round_trip() {
        let p = path(GridSpec::line(0.25, 9).unwrap(), Operator::Levy);
        let mut csv = Vec::new();
        write_path_csv(&mut csv, &p).unwrap();
        let text = String::from_utf8(csv.clone()).unwrap();
        assert!(text.starts_with("t,value\n0,0\n0.25,"));
        let (g, v) = read_path_csv(csv.as_slice()).unwrap();
        assert_eq!((g, v), (p.grid, p.values.clone()));
        let mut bin = Vec::new();
        write_path_bin(&mut bin, &p).unwrap();
        assert_eq!(read_path_bin(bin.as_slice()).unwrap(), (p.grid, p.values));
    }

    #[test]
    fn sheet_path_round_trip() {
        let p = path(GridSpec::plane(0.5, 4, 3).unwrap(), Operator::Sheet);
        let mut csv = Vec::new();
        write_path_csv(&mut csv, &p).unwrap();
        let (g, v) = read_path_csv(csv.as_slice()).unwrap();
        assert_eq!((g, v), (p.grid, p.values));
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(read_samples_csv("x\n1\n".as_bytes()), Err(Error::Format(_))));
        assert!(matches!(
            read_samples_csv("value\nabc\n".as_bytes()),
            Err(Error::Format(_))
        ));
        assert!(matches!(read_samples_bin(&b"LVYPATH1"[..]), Err(Error::Format(_))));
        let mut bin = Vec::new();
        write_samples_bin(&mut bin, &[1.0, 2.0]).unwrap();
        bin.truncate(bin.len() - 3);
        assert!(matches!(read_samples_bin(bin.as_slice()), Err(Error::Format(_))));
    }

    #[test]
    fn exponent_table() {
        let e = LevyExponent::gaussian(2.0).unwrap();
        let mut out = Vec::new();
        write_exponent_csv(&mut out, &e, &[0.0, 1.0]).unwrap();
        assert_eq!(String::from_utf8(out.clone()).unwrap(), "xi,psi\n0,0\n1,-1\n");
        let (xi, psi) = read_exponent_csv(out.as_slice()).unwrap();
        assert_eq!((xi, psi), (vec![0.0, 1.0], vec![0.0, -1.0]));
    }
}
