//! CSV output of Bloch-vector time series.
//!
//! Header `t,x,y,z,norm` optionally followed by `x_se,y_se,z_se`; numbers
//! carry 17 significant digits with trailing zeros trimmed, so every value
//! parses back to the identical `f64`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::ensemble::{BlochError, EnsembleResult};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::models::BlochVector;
use crate::sse::TrajectoryRecord;

pub const HEADER: &str = "t,x,y,z,norm";
pub const HEADER_SE: &str = "t,x,y,z,norm,x_se,y_se,z_se";

/// Formats `v` with 17 significant digits, trailing zeros removed.
/// Plain notation for exponents in `-5..=16`, scientific otherwise.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let digits = digits.trim_end_matches('0');
    let mut out = String::from(sign);
    if (-5..=16).contains(&exp) {
        if exp < 0 {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
            out.push_str(digits);
        } else {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                out.push_str(digits);
                out.extend(std::iter::repeat_n('0', int_len - digits.len()));
            } else {
                out.push_str(&digits[..int_len]);
                out.push('.');
                out.push_str(&digits[int_len..]);
            }
        }
    } else {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        let _ = write!(out, "e{exp}");
    }
    out
}

/// Renders a series as CSV text.
pub fn render_csv(grid: TimeGrid, bloch: &[BlochVector], errors: Option<&[BlochError]>) -> Result<String> {
    if bloch.len() != grid.len() || errors.is_some_and(|e| e.len() != grid.len()) {
        return Err(Error::GridMismatch(format!(
            "grid has {} points, series has {}",
            grid.len(),
            bloch.len()
        )));
    }
    let mut s = String::with_capacity(grid.len() * 64);
    s.push_str(if errors.is_some() { HEADER_SE } else { HEADER });
    s.push('\n');
    for (i, b) in bloch.iter().enumerate() {
        s.push_str(&format_number(grid.t(i)));
        for v in b.components() {
            s.push(',');
            s.push_str(&format_number(v));
        }
        if let Some(e) = errors {
            for v in [e[i].x, e[i].y, e[i].z] {
                s.push(',');
                s.push_str(&format_number(v));
            }
        }
        s.push('\n');
    }
    Ok(s)
}

fn write_text(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Writes a series to `path`, or to stdout when `path` is `None`.
pub fn write_series(
    grid: TimeGrid,
    bloch: &[BlochVector],
    errors: Option<&[BlochError]>,
    path: Option<&Path>,
) -> Result<()> {
    write_text(&render_csv(grid, bloch, errors)?, path)
}

/// Ensemble mean with standard errors.
pub fn emit_csv(result: &EnsembleResult, path: Option<&Path>) -> Result<()> {
    write_series(result.grid, &result.mean_bloch, Some(&result.std_error), path)
}

pub fn emit_trajectory_csv(record: &TrajectoryRecord, path: Option<&Path>) -> Result<()> {
    write_series(record.grid, &record.bloch, None, path)
}

/// Parsed CSV: column names and numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

pub fn parse_csv(text: &str) -> Result<CsvTable> {
    let mut lines = text.lines().enumerate();
    let header: Vec<String> = match lines.next() {
        Some((_, h)) => h.split(',').map(|s| s.trim().to_string()).collect(),
        None => {
            return Err(Error::Csv {
                line: 1,
                message: "empty file".into(),
            })
        }
    };
    let mut rows = Vec::new();
    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Csv {
                line: n + 1,
                message: e.to_string(),
            })?;
        if row.len() != header.len() {
            return Err(Error::Csv {
                line: n + 1,
                message: format!("expected {} fields, found {}", header.len(), row.len()),
            });
        }
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}

pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(-1.0), "-1");
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(3.0), "3");
        assert_eq!(format_number(0.1), "0.10000000000000001");
        assert_eq!(format_number(1e-4), "0.0001");
        assert_eq!(format_number(2.5e-7), "2.4999999999999999e-7");
        assert_eq!(format_number(0.5f64.powi(23)), "1.1920928955078125e-7");
        assert_eq!(format_number(1e20), "1e20");
        assert_eq!(format_number(1234.5), "1234.5");
    }

    #[test]
    fn numbers_roundtrip() {
        let vals = [
            std::f64::consts::PI,
            -std::f64::consts::E,
            1e-300,
            5e-324,
            f64::MAX,
            0.1 + 0.2,
            2.9999,
            -7.25e-6,
        ];
        for v in vals {
            assert_eq!(format_number(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn initial_row_and_roundtrip() {
        let grid = TimeGrid::new(0.1, 3).unwrap();
        let b = vec![
            BlochVector::EXCITED,
            BlochVector { x: 0.1, y: -0.2, z: 0.3, norm: 0.999 },
            BlochVector { x: 1.0 / 3.0, y: 0.0, z: -1.0, norm: 1.0 },
        ];
        let text = render_csv(grid, &b, None).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(HEADER));
        assert_eq!(lines.next(), Some("0,0,0,1,1"));
        assert!(!text.contains('\r'));
        let table = parse_csv(&text).unwrap();
        for (row, b) in table.rows.iter().zip(&b) {
            assert_eq!(&row[1..], &b.components());
        }
        assert!(render_csv(grid, &b[..2], None).is_err());
    }

    #[test]
    fn malformed_rows() {
        assert!(matches!(parse_csv("t,x\n0,1,2\n"), Err(Error::Csv { line: 2, .. })));
        assert!(matches!(parse_csv("t,x\n0,abc\n"), Err(Error::Csv { line: 2, .. })));
        assert!(parse_csv("").is_err());
    }
}
