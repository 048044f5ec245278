//! Deterministic file emission.

use crate::error::CliError;
use serde::Serialize;
use std::path::{Path, PathBuf};

/// 17 significant digits, `.` decimal separator, independent of locale.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))
}

/// Writes a header and rows with `\n` line endings.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<PathBuf, CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let file = std::fs::File::create(path).map_err(CliError::io(path))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(std::io::BufWriter::new(file));
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().map_err(CliError::io(path))?;
    Ok(path.to_path_buf())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<PathBuf, CliError> {
    std::fs::write(path, text).map_err(CliError::io(path))?;
    Ok(path.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_has_seventeen_significant_digits() {
        assert_eq!(sci(0.5), "5.0000000000000000e-1");
        assert_eq!(sci(-1.0 / 3.0), "-3.3333333333333331e-1");
        let x = 0.1 + 0.2;
        assert_eq!(sci(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_uses_newline_terminators() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        write_csv(&path, &["x", "p"], vec![vec!["1".into(), sci(0.25)]]).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "x,p\n1,2.5000000000000000e-1\n");
    }
}
