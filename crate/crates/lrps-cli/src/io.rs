//! Matrix file formats.
//!
//! Two interchangeable formats carry dense matrices:
//!
//! - **csv**: first line `rows,cols`, then `rows` lines of `cols`
//!   comma-separated decimals written with 17 significant digits, so a
//!   round-trip is exact to within 1e-15 relative;
//! - **bin**: magic bytes `LRSP`, `u32` little-endian rows, `u32` cols, then
//!   `rows*cols` little-endian IEEE-754 doubles in row-major order; a
//!   round-trip is bitwise exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use lrps_core::MatrixF64;

use crate::CliError;

pub const BIN_MAGIC: &[u8; 4] = b"LRSP";

/// On-disk format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Bin,
}

impl MatrixFormat {
    /// Picks the format from a file extension (`.csv` vs anything else).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Self::Csv,
            _ => Self::Bin,
        }
    }
}

pub fn write_matrix(path: &Path, m: &MatrixF64) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    match MatrixFormat::from_path(path) {
        MatrixFormat::Csv => write_matrix_csv(&mut out, m),
        MatrixFormat::Bin => write_matrix_bin(&mut out, m),
    }
    .map_err(|e| CliError::io(path, e))
}

pub fn read_matrix(path: &Path) -> Result<MatrixF64, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut input = BufReader::new(file);
    match MatrixFormat::from_path(path) {
        MatrixFormat::Csv => read_matrix_csv(&mut input),
        MatrixFormat::Bin => read_matrix_bin(&mut input),
    }
    .map_err(|e| e.with_path(path))
}

pub fn write_matrix_csv(out: &mut impl Write, m: &MatrixF64) -> std::io::Result<()> {
    writeln!(out, "{},{}", m.rows(), m.cols())?;
    for i in 0..m.rows() {
        let row = m.row(i);
        let mut line = String::with_capacity(row.len() * 24);
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&format!("{v:.16e}"));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_matrix_csv(input: &mut impl BufRead) -> Result<MatrixF64, CliError> {
    let mut lines = input.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::parse("line 1", "missing `rows,cols` header"))?;
    let header = header.map_err(|e| CliError::parse("line 1", &e.to_string()))?;
    let mut parts = header.trim().split(',');
    let rows: usize = parse_field(parts.next(), "line 1", "rows")?;
    let cols: usize = parse_field(parts.next(), "line 1", "cols")?;
    if parts.next().is_some() {
        return Err(CliError::parse("line 1", "trailing fields in header"));
    }

    let mut data = Vec::with_capacity(rows * cols);
    let mut consumed = 0usize;
    for (lineno, line) in lines {
        let line =
            line.map_err(|e| CliError::parse(&format!("line {}", lineno + 1), &e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if consumed == rows {
            return Err(CliError::parse(
                &format!("line {}", lineno + 1),
                "more data rows than the header declares",
            ));
        }
        let mut count = 0usize;
        for field in trimmed.split(',') {
            let value: f64 = field.trim().parse().map_err(|e| {
                CliError::parse(&format!("line {}", lineno + 1), &format!("{e}: `{field}`"))
            })?;
            if !value.is_finite() {
                return Err(CliError::parse(
                    &format!("line {}", lineno + 1),
                    "non-finite value",
                ));
            }
            data.push(value);
            count += 1;
        }
        if count != cols {
            return Err(CliError::parse(
                &format!("line {}", lineno + 1),
                &format!("expected {cols} fields, found {count}"),
            ));
        }
        consumed += 1;
    }
    if consumed != rows {
        return Err(CliError::parse(
            "end of file",
            &format!("expected {rows} data rows, found {consumed}"),
        ));
    }
    MatrixF64::from_vec_finite(rows, cols, data)
        .map_err(|e| CliError::parse("matrix body", &e.to_string()))
}

pub fn write_matrix_bin(out: &mut impl Write, m: &MatrixF64) -> std::io::Result<()> {
    out.write_all(BIN_MAGIC)?;
    out.write_all(&(m.rows() as u32).to_le_bytes())?;
    out.write_all(&(m.cols() as u32).to_le_bytes())?;
    for v in m.data() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_matrix_bin(input: &mut impl Read) -> Result<MatrixF64, CliError> {
    let mut magic = [0u8; 4];
    read_exact_at(input, &mut magic, 0)?;
    if &magic != BIN_MAGIC {
        return Err(CliError::parse("byte 0", "bad magic, expected `LRSP`"));
    }
    let mut word = [0u8; 4];
    read_exact_at(input, &mut word, 4)?;
    let rows = u32::from_le_bytes(word) as usize;
    read_exact_at(input, &mut word, 8)?;
    let cols = u32::from_le_bytes(word) as usize;
    if rows == 0 || cols == 0 {
        return Err(CliError::parse("byte 4", "zero dimension"));
    }
    let mut data = Vec::with_capacity(rows * cols);
    let mut buf = [0u8; 8];
    for idx in 0..rows * cols {
        read_exact_at(input, &mut buf, 12 + 8 * idx)?;
        data.push(f64::from_le_bytes(buf));
    }
    // Detect trailing garbage.
    let mut one = [0u8; 1];
    if input
        .read(&mut one)
        .map_err(|e| CliError::parse("tail", &e.to_string()))?
        != 0
    {
        return Err(CliError::parse(
            &format!("byte {}", 12 + 8 * rows * cols),
            "trailing bytes after payload",
        ));
    }
    MatrixF64::from_vec_finite(rows, cols, data)
        .map_err(|e| CliError::parse("payload", &e.to_string()))
}

fn read_exact_at(input: &mut impl Read, buf: &mut [u8], offset: usize) -> Result<(), CliError> {
    input
        .read_exact(buf)
        .map_err(|e| CliError::parse(&format!("byte {offset}"), &format!("truncated ({e})")))
}

fn parse_field<T: std::str::FromStr>(
    field: Option<&str>,
    at: &str,
    name: &str,
) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    field
        .ok_or_else(|| CliError::parse(at, &format!("missing {name}")))?
        .trim()
        .parse()
        .map_err(|e| CliError::parse(at, &format!("{name}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use lrps_core::{chacha_rng, gaussian_matrix};

    #[test]
    fn bin_layout_is_magic_dims_payload() {
        let m = MatrixF64::from_vec(1, 1, vec![42.0]).unwrap();
        let mut buf = Vec::new();
        write_matrix_bin(&mut buf, &m).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 4 + 8);
        assert_eq!(&buf[..4], b"LRSP");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 1);
        assert_eq!(f64::from_le_bytes(buf[12..].try_into().unwrap()), 42.0);
    }

    #[test]
    fn bin_round_trip_is_bitwise() {
        let mut rng = chacha_rng(1);
        let m = gaussian_matrix::<f64>(5, 7, &mut rng);
        let mut buf = Vec::new();
        write_matrix_bin(&mut buf, &m).unwrap();
        let back = read_matrix_bin(&mut buf.as_slice()).unwrap();
        assert_eq!(m.data(), back.data());
    }

    #[test]
    fn csv_round_trip_is_near_exact() {
        let mut rng = chacha_rng(2);
        let m = gaussian_matrix::<f64>(5, 7, &mut rng);
        let mut buf = Vec::new();
        write_matrix_csv(&mut buf, &m).unwrap();
        let back = read_matrix_csv(&mut BufReader::new(buf.as_slice())).unwrap();
        let scale = m.max_abs();
        for (a, b) in m.data().iter().zip(back.data()) {
            assert!((a - b).abs() <= 1e-15 * scale);
        }
    }

    #[test]
    fn truncated_bin_names_byte_offset() {
        let m = MatrixF64::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let mut buf = Vec::new();
        write_matrix_bin(&mut buf, &m).unwrap();
        buf.truncate(buf.len() - 3);
        let err = read_matrix_bin(&mut buf.as_slice()).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("byte 36"), "error was: {text}");
    }

    #[test]
    fn bad_magic_is_rejected() {
        let buf = b"NOPE\x01\x00\x00\x00\x01\x00\x00\x00".to_vec();
        assert!(read_matrix_bin(&mut buf.as_slice()).is_err());
    }

    #[test]
    fn csv_nan_is_rejected_with_line() {
        let text = "2,2\n1.0,2.0\nNaN,4.0\n";
        let err = read_matrix_csv(&mut BufReader::new(text.as_bytes())).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn csv_wrong_field_count_is_rejected() {
        let text = "2,2\n1.0,2.0,9.0\n3.0,4.0\n";
        let err = read_matrix_csv(&mut BufReader::new(text.as_bytes())).unwrap_err();
        assert!(err.to_string().contains("expected 2 fields"), "{err}");
    }
}
