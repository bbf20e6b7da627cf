//! Trajectory CSV files.
//!
//! Header `t,phase,x1_1..x1_m,x2_1..x2_n,kl_to_ref,min_component`, one row per
//! recorded step, LF line endings. Floats carry 17 significant digits in
//! scientific notation, which round-trips binary64 exactly; non-finite values
//! are written `inf`, `-inf` and `nan`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use pgames_core::Trajectory;

use crate::error::{HarnessError, Result};

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn parse_float(s: &str) -> Option<f64> {
    match s {
        "nan" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok().filter(|v: &f64| v.is_finite()),
    }
}

pub fn header(m: usize, n: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string(), "phase".to_string()];
    cols.extend((1..=m).map(|i| format!("x1_{i}")));
    cols.extend((1..=n).map(|j| format!("x2_{j}")));
    cols.push("kl_to_ref".into());
    cols.push("min_component".into());
    cols
}

/// The CSV document for `traj` as a string.
pub fn render_csv(traj: &Trajectory) -> Result<String> {
    let (m, n) = traj
        .dims()
        .ok_or_else(|| HarnessError::Usage("cannot write an empty trajectory".into()))?;
    let mut out = header(m, n).join(",");
    out.push('\n');
    for s in &traj.steps {
        write!(out, "{},{}", s.t, s.phase).unwrap();
        for v in s.state.concat_probs().into_iter().chain([s.kl_to_ref, s.min_component]) {
            out.push(',');
            out.push_str(&format_float(v));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn emit_csv(traj: &Trajectory, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_csv(traj)?).map_err(|e| HarnessError::io(path, e))
}

/// A parsed trajectory CSV: column names and rows of floats (`t` and
/// `phase` included, converted to floats).
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// `(t, value)` pairs for one column.
    pub fn series(&self, name: &str) -> Option<Vec<(f64, f64)>> {
        let t = self.column("t")?;
        Some(t.into_iter().zip(self.column(name)?).collect())
    }
}

pub fn parse_csv(text: &str, path: &str) -> Result<CsvTable> {
    let err = |line: usize, message: String| HarnessError::Csv {
        path: path.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let (_, head) = lines.next().ok_or_else(|| err(1, "file is empty".into()))?;
    let columns: Vec<String> = head.split(',').map(str::to_string).collect();
    if columns.first().map(String::as_str) != Some("t") {
        return Err(err(1, "first column must be `t`".into()));
    }
    let mut rows = Vec::new();
    for (k, line) in lines {
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| parse_float(f).ok_or_else(|| err(k + 1, format!("cannot parse `{f}` as a number"))))
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != columns.len() {
            return Err(err(k + 1, format!("expected {} fields, found {}", columns.len(), row.len())));
        }
        rows.push(row);
    }
    Ok(CsvTable { columns, rows })
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<CsvTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_csv(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_use_seventeen_significant_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(-2.5), "-2.5000000000000000e0");
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(format_float(f64::NEG_INFINITY), "-inf");
        assert_eq!(format_float(f64::NAN), "nan");
        assert_eq!(format_float(5e-324), "4.9406564584124654e-324");
    }

    #[test]
    fn parse_inverts_format() {
        for v in [0.1, 1.0 / 3.0, -7e300, 5e-324, 0.0, f64::INFINITY, f64::NEG_INFINITY] {
            assert_eq!(parse_float(&format_float(v)).unwrap().to_bits(), v.to_bits());
        }
        assert!(parse_float("nan").unwrap().is_nan());
        assert_eq!(parse_float("NaN"), None);
        assert_eq!(parse_float("1e400"), None);
        assert_eq!(parse_float(""), None);
    }

    #[test]
    fn header_lists_both_players() {
        assert_eq!(
            header(2, 3).join(","),
            "t,phase,x1_1,x1_2,x2_1,x2_2,x2_3,kl_to_ref,min_component"
        );
    }

    #[test]
    fn malformed_rows_are_located() {
        let e = parse_csv("t,a\n0,1\n1,x\n", "f.csv").unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");
        let e = parse_csv("t,a\n0,1,2\n", "f.csv").unwrap_err().to_string();
        assert!(e.contains("expected 2 fields"), "{e}");
        assert!(parse_csv("", "f.csv").is_err());
    }
}
