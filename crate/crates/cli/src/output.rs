//! Deterministic CSV and TOML writers.

use serde::Serialize;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

/// Shortest round-trip scientific form, so identical inputs give identical bytes.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub struct CsvTable {
    writer: csv::Writer<File>,
    path: PathBuf,
}

impl CsvTable {
    pub fn create(dir: &Path, name: &str, header: &[&str]) -> io::Result<Self> {
        let path = dir.join(name);
        let mut writer = csv::Writer::from_path(&path)?;
        writer.write_record(header)?;
        Ok(Self { writer, path })
    }

    pub fn row(&mut self, values: &[String]) -> io::Result<()> {
        self.writer.write_record(values).map_err(io::Error::from)
    }

    pub fn finish(mut self) -> io::Result<PathBuf> {
        self.writer.flush()?;
        Ok(self.path)
    }
}

pub fn write_toml<T: Serialize>(dir: &Path, name: &str, value: &T) -> io::Result<PathBuf> {
    let text = toml::to_string(value).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    write_text(dir, name, &text)
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> io::Result<PathBuf> {
    let path = dir.join(name);
    let mut file = File::create(&path)?;
    file.write_all(text.as_bytes())?;
    Ok(path)
}
