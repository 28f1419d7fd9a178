//! Grid snapshots as CSV (`j,k,re,im` rows after an `L,N` header) or flat little-endian binary.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::ComplexGrid;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"CGRID001";

pub fn write_csv<W: Write>(grid: &ComplexGrid, out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "L,N")?;
    writeln!(w, "{},{}", grid.half_width(), grid.n())?;
    writeln!(w, "j,k,re,im")?;
    let n = grid.n();
    for (i, v) in grid.values().iter().enumerate() {
        writeln!(w, "{},{},{},{}", i / n, i % n, v.re, v.im)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<ComplexGrid> {
    let reader = BufReader::new(input);
    let mut lines = reader.lines().enumerate();
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, l)) => Ok((i + 1, l?)),
            None => Err(Error::InvalidGrid(format!("missing {what}"))),
        }
    };
    next("header")?;
    let (ln, dims) = next("dimensions")?;
    let mut parts = dims.split(',');
    let l: f64 = parse(parts.next(), ln)?;
    let n: usize = parse(parts.next(), ln)?;
    next("column header")?;
    let mut values = vec![Complex64::new(0.0, 0.0); n * n];
    let mut seen = 0usize;
    while let Ok((ln, row)) = next("row") {
        if row.trim().is_empty() {
            continue;
        }
        let mut f = row.split(',');
        let j: usize = parse(f.next(), ln)?;
        let k: usize = parse(f.next(), ln)?;
        let re: f64 = parse(f.next(), ln)?;
        let im: f64 = parse(f.next(), ln)?;
        if j >= n || k >= n {
            return Err(Error::InvalidGrid(format!("line {ln}: index ({j},{k}) out of range")));
        }
        values[j * n + k] = Complex64::new(re, im);
        seen += 1;
    }
    if seen != n * n {
        return Err(Error::InvalidGrid(format!("expected {} rows, found {seen}", n * n)));
    }
    ComplexGrid::new(l, n, values)
}

fn parse<T: std::str::FromStr>(s: Option<&str>, line: usize) -> Result<T> {
    s.and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::InvalidGrid(format!("line {line}: malformed field")))
}

pub fn write_binary<W: Write>(grid: &ComplexGrid, out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    w.write_all(MAGIC)?;
    w.write_all(&grid.half_width().to_le_bytes())?;
    w.write_all(&(grid.n() as u64).to_le_bytes())?;
    for v in grid.values() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(input: R) -> Result<ComplexGrid> {
    let mut r = BufReader::new(input);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::InvalidGrid("bad snapshot magic".into()));
    }
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    let l = f64::from_le_bytes(b);
    r.read_exact(&mut b)?;
    let n = u64::from_le_bytes(b) as usize;
    if !n.is_power_of_two() || n > 1 << 14 {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut values = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        r.read_exact(&mut b)?;
        let re = f64::from_le_bytes(b);
        r.read_exact(&mut b)?;
        values.push(Complex64::new(re, f64::from_le_bytes(b)));
    }
    ComplexGrid::new(l, n, values)
}

/// Writes `.csv` or binary (any other extension) depending on the path.
pub fn save(grid: &ComplexGrid, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    if path.extension().is_some_and(|e| e == "csv") {
        write_csv(grid, f)
    } else {
        write_binary(grid, f)
    }
}

pub fn load(path: &Path) -> Result<ComplexGrid> {
    let f = std::fs::File::open(path)?;
    if path.extension().is_some_and(|e| e == "csv") {
        read_csv(f)
    } else {
        read_binary(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let g = ComplexGrid::from_fn(1.5, 8, |z| z * z + Complex64::new(0.1, -1.0 / 3.0)).unwrap();
        let mut buf = Vec::new();
        write_csv(&g, &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), g);
        let mut bin = Vec::new();
        write_binary(&g, &mut bin).unwrap();
        assert_eq!(read_binary(bin.as_slice()).unwrap(), g);
    }

    #[test]
    fn rejects_truncated_csv() {
        let g = ComplexGrid::zeros(1.0, 4).unwrap();
        let mut buf = Vec::new();
        write_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
        assert!(read_csv(cut.as_bytes()).is_err());
    }
}
