//! CSV helpers shared by the dataset manifest format and factor dumps.
//!
//! Matrices are written one row per line, comma-separated, no header.
//! Values use Rust's shortest round-trippable decimal form; NaN is spelled
//! `nan`, which is the manifest encoding for a missing instance column.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

fn fmt_value(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v}")
    }
}

pub fn write_matrix_csv(path: &Path, m: &Array2<f64>) -> Result<()> {
    let mut out = fs::File::create(path)?;
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|&v| fmt_value(v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn read_matrix_csv(path: &Path) -> Result<Array2<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::format(format!("cannot read {}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col, field) in line.split(',').enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::format(format!(
                    "{}: row {}, column {}: cannot parse {:?} as a number",
                    path.display(),
                    lineno,
                    col,
                    field.trim()
                ))
            })?;
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::format(format!(
                    "{}: row {} has {} columns, expected {}",
                    path.display(),
                    lineno,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::format(format!("{}: empty matrix", path.display())));
    }
    let nrows = rows.len();
    let ncols = rows[0].len();
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Array2::from_shape_vec((nrows, ncols), flat)
        .map_err(|e| Error::format(format!("{}: {e}", path.display())))
}

pub fn write_labels_csv(path: &Path, labels: &[usize]) -> Result<()> {
    let mut out = fs::File::create(path)?;
    for l in labels {
        writeln!(out, "{l}")?;
    }
    Ok(())
}

pub fn read_labels_csv(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::format(format!("cannot read {}: {e}", path.display())))?;
    let mut labels = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let l: usize = t.parse().map_err(|_| {
            Error::format(format!(
                "{}: line {}: {:?} is not a nonnegative integer class id",
                path.display(),
                lineno,
                t
            ))
        })?;
        labels.push(l);
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn matrix_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let m = array![
            [1.0, -2.5, 1.0 / 3.0],
            [f64::MIN_POSITIVE, 1e300, -0.1234567890123456789]
        ];
        write_matrix_csv(&path, &m).unwrap();
        let back = read_matrix_csv(&path).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn nan_spelling_roundtrips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        write_matrix_csv(&path, &array![[f64::NAN, 1.0]]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.trim(), "nan,1");
        let back = read_matrix_csv(&path).unwrap();
        assert!(back[(0, 0)].is_nan());
        assert_eq!(back[(0, 1)], 1.0);
    }

    #[test]
    fn ragged_rows_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        std::fs::write(&path, "1,2\n3\n").unwrap();
        assert!(read_matrix_csv(&path).is_err());
    }
}
