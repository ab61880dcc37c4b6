use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Result;
use edgeav_core::ingest::{AreaGrid, IngestError};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::CliError;

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())).into())
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())).into())
}

/// Creates `path` and its parent directories, writes through `fill`, and
/// flushes.
pub fn create_with(path: &Path, fill: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let io_err = |e: std::io::Error| CliError::Input(format!("cannot write {}: {e}", path.display()));
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err)?;
    }
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    fill(&mut out)?;
    out.flush().map_err(io_err)?;
    Ok(())
}

/// Rewrites a core ingest error with the offending file in the message.
pub fn ingest_error(path: &Path, e: IngestError) -> anyhow::Error {
    let p = path.display();
    match e {
        IngestError::Io(io) => CliError::Input(format!("{p}: {io}")).into(),
        IngestError::Format { line, message } => CliError::Format(format!("{p}: line {line}: {message}")).into(),
        IngestError::InvalidGrid(_) | IngestError::InvalidProfile(_) => CliError::Format(format!("{p}: {e}")).into(),
        other => CliError::Input(format!("{p}: {other}")).into(),
    }
}

pub fn load_grid(path: Option<&Path>) -> Result<AreaGrid> {
    match path {
        Some(p) => AreaGrid::from_json(&read_text(p)?).map_err(|e| ingest_error(p, e)),
        None => Ok(AreaGrid::cologne()),
    }
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    create_with(path, |out| {
        let mut w = csv::Writer::from_writer(out);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    })?;
    eprintln!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(())
}

pub fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut reader = csv::Reader::from_reader(open(path)?);
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        let row: T = row.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            CliError::Format(format!("{}: line {line}: {e}", path.display()))
        })?;
        rows.push(row);
    }
    Ok(rows)
}

/// Expands directories into their `*.json` files, sorted by name.
pub fn json_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let entries = fs::read_dir(p).map_err(|e| CliError::Input(format!("cannot list {}: {e}", p.display())))?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}
