//! Tabular results: comment header, column names, float rows, CSV output.

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// A rectangular table of f64 values with named columns and `#` comments
/// echoing how it was produced.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table {
            comments: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty() || self.columns.len() < 2
    }

    /// Serialize as CSV: comments first, then the header row, then data
    /// rows with 17 significant digits.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        for c in &self.comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let mut first = true;
            for v in row {
                if !first {
                    write!(out, ",")?;
                }
                write!(out, "{v:.16e}")?;
                first = false;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Write the CSV through a temporary file in the destination directory
    /// and rename it into place, so a crash never leaves a torn file.
    pub fn write_csv_atomic(&self, path: &Path) -> Result<(), CliError> {
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
        let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))
            .map_err(|e| CliError::Io(format!("creating temporary file: {e}")))?;
        self.write_csv(&mut tmp)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
        tmp.persist(path)
            .map_err(|e| CliError::Io(format!("renaming into {}: {e}", path.display())))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_comments_header_and_full_precision() {
        let mut t = Table::new(vec!["t".into(), "P".into()]);
        t.comment("gamma=1");
        t.push(vec![0.0, 1.0 / 3.0]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# gamma=1\nt,P\n"));
        assert!(text.contains("3.3333333333333331e-1"));
    }

    #[test]
    fn atomic_write_creates_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let mut t = Table::new(vec!["a".into(), "b".into()]);
        t.push(vec![1.0, 2.0]);
        t.write_csv_atomic(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("a,b"));
    }
}
