//! Matrix and result-table file formats.
//!
//! Matrices travel either as plain numeric CSV (one matrix row per line,
//! comma separated, printed with 17 significant digits so values survive a
//! round trip) or as a binary container: the magic bytes `SEPCA1`, two
//! little-endian u64 dimensions (rows, then columns), then `rows * cols`
//! little-endian f64 values in row-major order.

use crate::bench::{CurveRow, ResultRow};
use crate::CliError;
use sepca::DataMatrix;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

pub const MAGIC: &[u8; 6] = b"SEPCA1";

/// Result-table column order; pinned.
pub const RESULT_HEADER: &str =
    "algorithm,n,theta,trials,mean_loss,median_loss,tpr,fdr,hamming,selected_mean";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Binary,
}

/// Read a matrix, sniffing the container from the leading magic bytes.
pub fn read_matrix(path: &Path) -> Result<DataMatrix, CliError> {
    let bytes =
        fs::read(path).map_err(|e| CliError::io(format!("reading {}: {e}", path.display())))?;
    if bytes.starts_with(MAGIC) {
        decode_binary(&bytes, path)
    } else {
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| CliError::io(format!("{} is not valid UTF-8: {e}", path.display())))?;
        parse_csv(text, path)
    }
}

pub fn write_matrix(path: &Path, m: &DataMatrix, format: MatrixFormat) -> Result<(), CliError> {
    let file = fs::File::create(path)
        .map_err(|e| CliError::io(format!("creating {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    let res = match format {
        MatrixFormat::Csv => write_csv(&mut w, m),
        MatrixFormat::Binary => write_binary(&mut w, m),
    };
    res.map_err(|e| CliError::io(format!("writing {}: {e}", path.display())))
}

fn write_csv<W: Write>(w: &mut W, m: &DataMatrix) -> std::io::Result<()> {
    for row in m.row_iter() {
        let mut first = true;
        for v in row {
            if !first {
                w.write_all(b",")?;
            }
            first = false;
            // 17 significant digits; round trips f64 exactly.
            write!(w, "{v:.16e}")?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

fn write_binary<W: Write>(w: &mut W, m: &DataMatrix) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(m.rows() as u64).to_le_bytes())?;
    w.write_all(&(m.cols() as u64).to_le_bytes())?;
    for v in m.data() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn parse_csv(text: &str, path: &Path) -> Result<DataMatrix, CliError> {
    let mut data = Vec::new();
    let mut cols: Option<usize> = None;
    let mut rows = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut count = 0usize;
        for (field_no, field) in line.split(',').enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                CliError::io(format!(
                    "{}: line {}, field {}: not a number: {:?}",
                    path.display(),
                    lineno + 1,
                    field_no + 1,
                    field.trim()
                ))
            })?;
            data.push(v);
            count += 1;
        }
        match cols {
            None => cols = Some(count),
            Some(c) if c != count => {
                return Err(CliError::io(format!(
                    "{}: line {} has {} fields, expected {}",
                    path.display(),
                    lineno + 1,
                    count,
                    c
                )))
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| CliError::io(format!("{}: empty matrix", path.display())))?;
    DataMatrix::from_vec(rows, cols, data)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn decode_binary(bytes: &[u8], path: &Path) -> Result<DataMatrix, CliError> {
    let need_header = MAGIC.len() + 16;
    if bytes.len() < need_header {
        return Err(CliError::io(format!(
            "{}: truncated header ({} bytes, need {need_header})",
            path.display(),
            bytes.len()
        )));
    }
    let rows = u64::from_le_bytes(bytes[6..14].try_into().unwrap()) as usize;
    let cols = u64::from_le_bytes(bytes[14..22].try_into().unwrap()) as usize;
    let need = rows
        .checked_mul(cols)
        .and_then(|e| e.checked_mul(8))
        .and_then(|b| b.checked_add(need_header))
        .ok_or_else(|| CliError::io(format!("{}: dimensions overflow", path.display())))?;
    if bytes.len() != need {
        return Err(CliError::io(format!(
            "{}: expected {} bytes for a {}x{} matrix, found {} (truncated at byte {})",
            path.display(),
            need,
            rows,
            cols,
            bytes.len(),
            bytes.len().min(need)
        )));
    }
    let data: Vec<f64> = bytes[need_header..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DataMatrix::from_vec(rows, cols, data)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    JsonLines,
}

pub fn write_results(path: &Path, rows: &[ResultRow], format: TableFormat) -> Result<(), CliError> {
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str(RESULT_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    r.algorithm,
                    r.n,
                    r.theta,
                    r.trials,
                    r.mean_loss,
                    r.median_loss,
                    r.tpr,
                    r.fdr,
                    r.hamming,
                    r.selected_mean
                ));
            }
        }
        TableFormat::JsonLines => {
            for r in rows {
                out.push_str(&serde_json::to_string(r).expect("result row serializes"));
                out.push('\n');
            }
        }
    }
    fs::write(path, out).map_err(|e| CliError::io(format!("writing {}: {e}", path.display())))
}

pub fn write_curves(path: &Path, rows: &[CurveRow], format: TableFormat) -> Result<(), CliError> {
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str("algorithm,n,beta_crit\n");
            for r in rows {
                out.push_str(&format!("{},{},{}\n", r.algorithm, r.n, r.beta_crit));
            }
        }
        TableFormat::JsonLines => {
            for r in rows {
                out.push_str(&serde_json::to_string(r).expect("curve row serializes"));
                out.push('\n');
            }
        }
    }
    fs::write(path, out).map_err(|e| CliError::io(format!("writing {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn tmp(name: &str) -> PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!("sepca-io-{}-{name}", std::process::id()));
        p
    }

    #[test]
    fn binary_roundtrip_is_bitwise() {
        let m = DataMatrix::from_vec(2, 3, vec![1.5, -2.25, 3.0, 0.1, 1e-300, 7.0]).unwrap();
        let path = tmp("roundtrip.bin");
        write_matrix(&path, &m, MatrixFormat::Binary).unwrap();
        let back = read_matrix(&path).unwrap();
        assert_eq!(m, back);
        let bytes = fs::read(&path).unwrap();
        assert_eq!(&bytes[..6], MAGIC);
        fs::remove_file(&path).ok();
    }

    #[test]
    fn csv_roundtrip_is_exact_at_17_digits() {
        let vals = vec![
            1.0 / 3.0,
            -2.2250738585072014e-308,
            std::f64::consts::PI,
            123456789.123456789,
        ];
        let m = DataMatrix::from_vec(2, 2, vals).unwrap();
        let path = tmp("roundtrip.csv");
        write_matrix(&path, &m, MatrixFormat::Csv).unwrap();
        let back = read_matrix(&path).unwrap();
        assert_eq!(m, back);
        fs::remove_file(&path).ok();
    }

    #[test]
    fn small_csv_parses() {
        let path = tmp("simple.csv");
        fs::write(&path, "1,2\n3,4\n").unwrap();
        let m = read_matrix(&path).unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.get(1, 0), 3.0);
        fs::remove_file(&path).ok();
    }

    #[test]
    fn ragged_csv_names_the_line() {
        let path = tmp("ragged.csv");
        fs::write(&path, "1,2\n3\n").unwrap();
        let err = read_matrix(&path).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert_eq!(err.exit_code(), 3);
        fs::remove_file(&path).ok();
    }

    #[test]
    fn bad_cell_names_position() {
        let path = tmp("cell.csv");
        fs::write(&path, "1,2\n3,abc\n").unwrap();
        let err = read_matrix(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2") && msg.contains("field 2"), "{msg}");
        fs::remove_file(&path).ok();
    }

    #[test]
    fn truncated_binary_reports_position() {
        let m = DataMatrix::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let path = tmp("trunc.bin");
        write_matrix(&path, &m, MatrixFormat::Binary).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 5);
        fs::write(&path, &bytes).unwrap();
        let err = read_matrix(&path).unwrap_err();
        assert!(err.to_string().contains("truncated"), "{err}");
        fs::remove_file(&path).ok();
    }
}
