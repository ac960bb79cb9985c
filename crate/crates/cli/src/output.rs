//! Atomic file output, CSV rows and flat `key = value` reports.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::CliError;

fn io(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Write `contents` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(io(dir))?;
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    let mut f = fs::File::create(&tmp).map_err(io(&tmp))?;
    f.write_all(contents.as_bytes()).map_err(io(&tmp))?;
    f.sync_all().map_err(io(&tmp))?;
    drop(f);
    fs::rename(&tmp, &path).map_err(io(&path))?;
    Ok(path)
}

/// Comma-joined row of shortest round-trip decimals.
pub fn csv_row(values: &[f64]) -> String {
    let mut s = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        write!(s, "{v}").unwrap();
    }
    s
}

/// Ordered `key = value` lines.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    /// Empty report.
    pub fn new() -> Self {
        Self::default()
    }

    /// Append a line.
    pub fn put(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.lines.push((key.into(), value.to_string()));
        self
    }

    /// Value of the first line with `key`.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Text form, one `key = value` per line.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.lines {
            writeln!(s, "{k} = {v}").unwrap();
        }
        s
    }

    /// Parse the text form.
    pub fn parse(text: &str) -> Self {
        let lines =
            text.lines().filter_map(|l| l.split_once(" = ")).map(|(k, v)| (k.to_string(), v.to_string())).collect();
        Self { lines }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        let v = [0.1, 1e-300, -2.5e17, 1.0 / 3.0, 0.0];
        let row = csv_row(&v);
        let back: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(back, v);
        assert_eq!(csv_row(&[1.0, 0.5]), "1,0.5");
    }

    #[test]
    fn report_round_trip() {
        let mut r = Report::new();
        r.put("a", 1).put("b.c", "PASS").put("x", 1e-9);
        assert_eq!(Report::parse(&r.render()), r);
        assert_eq!(r.get("x"), Some("0.000000001"));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "f.txt", "one").unwrap();
        let p = write_atomic(dir.path(), "f.txt", "two").unwrap();
        assert_eq!(fs::read_to_string(p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
