//! Text and binary export of wavefunctions and numeric tables.
//!
//! Floats are written with 17 significant digits so every value
//! round-trips bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::quantum::{Grid, PhysicalConstants, WaveFunction};

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number carrying the 17-digit text; non-finite values become `null`.
pub fn json_f64(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    fmt_f64(x).parse::<serde_json::Number>().map(Value::Number).unwrap_or(Value::Null)
}

pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable value");
    s.push('\n');
    s
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    fs::write(path, to_json_string(v))?;
    Ok(())
}

/// Comma-separated table with a header row.
pub fn table_csv(headers: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = headers.join(",");
    s.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

pub fn write_table_csv(path: &Path, headers: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    fs::write(path, table_csv(headers, rows))?;
    Ok(())
}

/// Columns `x, re, im, abs2`.
pub fn wavefunction_csv(psi: &WaveFunction) -> String {
    let mut s = String::from("x,re,im,abs2\n");
    for (i, z) in psi.samples.iter().enumerate() {
        let _ = writeln!(s, "{},{},{},{}", fmt_f64(psi.grid.x(i)), fmt_f64(z.re), fmt_f64(z.im), fmt_f64(z.norm_sqr()));
    }
    s
}

pub fn write_wavefunction_csv(psi: &WaveFunction, path: &Path) -> Result<()> {
    fs::write(path, wavefunction_csv(psi))?;
    Ok(())
}

const HEADER_BYTES: usize = 8 * 6;

/// Little-endian dump: `n: u64`, then `x_min, x_max, t, hbar, m` as `f64`,
/// then interleaved real and imaginary parts.
pub fn wavefunction_bytes(psi: &WaveFunction) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_BYTES + 16 * psi.samples.len());
    out.extend_from_slice(&(psi.grid.len() as u64).to_le_bytes());
    for v in [psi.grid.x_min(), psi.grid.x_max(), psi.t, psi.consts.hbar, psi.consts.m] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for z in &psi.samples {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

fn word(b: &[u8], i: usize) -> [u8; 8] {
    b[8 * i..8 * i + 8].try_into().expect("8-byte slice")
}

pub fn wavefunction_from_bytes(bytes: &[u8]) -> Result<WaveFunction> {
    let bad = |msg: String| Error::Io(format!("malformed wavefunction dump: {msg}"));
    if bytes.len() < HEADER_BYTES {
        return Err(bad(format!("{} bytes is shorter than the header", bytes.len())));
    }
    let n = u64::from_le_bytes(word(bytes, 0));
    let expect = (n as u128) * 16 + HEADER_BYTES as u128;
    if expect != bytes.len() as u128 {
        return Err(bad(format!("header announces {n} samples but the body has {} bytes", bytes.len() - HEADER_BYTES)));
    }
    let f = |i| f64::from_le_bytes(word(bytes, i));
    let grid = Grid::new(f(1), f(2), n as usize)?;
    let consts = PhysicalConstants::new(f(4), f(5))?;
    let samples = (0..n as usize).map(|k| Complex64::new(f(6 + 2 * k), f(7 + 2 * k))).collect();
    WaveFunction::new(grid, samples, f(3), consts)
}

pub fn write_wavefunction_binary(psi: &WaveFunction, path: &Path) -> Result<()> {
    fs::write(path, wavefunction_bytes(psi))?;
    Ok(())
}

pub fn read_wavefunction_binary(path: &Path) -> Result<WaveFunction> {
    wavefunction_from_bytes(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::gaussian_packet;

    fn sample() -> WaveFunction {
        let g = Grid::new(-5.0, 6.0, 64).unwrap();
        gaussian_packet(&g, &PhysicalConstants::new(0.7, 1.3).unwrap(), 0.3, 0.8, 1.0, 0.25).unwrap()
    }

    #[test]
    fn binary_round_trip_is_exact() {
        let psi = sample();
        let back = wavefunction_from_bytes(&wavefunction_bytes(&psi)).unwrap();
        assert_eq!(back, psi);
    }

    #[test]
    fn binary_rejects_truncation() {
        let b = wavefunction_bytes(&sample());
        assert!(matches!(wavefunction_from_bytes(&b[..b.len() - 3]), Err(Error::Io(_))));
        assert!(wavefunction_from_bytes(&b[..10]).is_err());
    }

    #[test]
    fn text_keeps_all_digits() {
        let x = 0.1f64 + 0.2;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        assert_eq!(json_f64(x).to_string().parse::<f64>().unwrap(), x);
        assert_eq!(json_f64(f64::NAN), Value::Null);
        let csv = wavefunction_csv(&sample());
        assert!(csv.starts_with("x,re,im,abs2\n"));
        assert_eq!(csv.lines().count(), 65);
    }
}
