//! Run manifest written by `edgeav all`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Result;
use edgeav_core::ingest::SynthProfile;
use edgeav_core::ModelParams;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::AllArgs;
use crate::commands::TRIP_NOTE;
use crate::error::CliError;
use crate::files::{create_with, json_files, read_text};
use crate::tables::MANIFEST_JSON;

#[derive(Debug, Serialize)]
struct FileDigest {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    seed: Option<u64>,
    inputs: Vec<FileDigest>,
    parameters: &'a ModelParams,
    overrides: &'a BTreeMap<String, String>,
    outputs: Vec<FileDigest>,
    notes: Vec<String>,
}

fn sha256(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(bytes)))
}

fn digest(path: &Path, shown: String) -> Result<FileDigest> {
    Ok(FileDigest {
        path: shown,
        sha256: sha256(path)?,
    })
}

/// Every regular file below `dir`, relative to it, sorted.
fn files_below(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    let mut pending = vec![dir.to_path_buf()];
    while let Some(d) = pending.pop() {
        let entries = fs::read_dir(&d).map_err(|e| CliError::Input(format!("cannot list {}: {e}", d.display())))?;
        for entry in entries {
            let path = entry?.path();
            if path.is_dir() {
                pending.push(path);
            } else {
                found.push(path.strip_prefix(dir)?.to_path_buf());
            }
        }
    }
    found.sort();
    Ok(found)
}

fn slash_path(p: &Path) -> String {
    p.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

pub fn write(args: &AllArgs, model: &ModelParams, overrides: &BTreeMap<String, String>) -> Result<()> {
    let seed = match (&args.trace, &args.profile) {
        (Some(_), _) => None,
        (None, _) if args.seed.is_some() => args.seed,
        (None, Some(p)) => Some(SynthProfile::from_json(&read_text(p)?)?.seed),
        (None, None) => Some(SynthProfile::cologne_shaped(1).seed),
    };

    let mut inputs = Vec::new();
    for p in [&args.profile, &args.trace, &args.grid, &args.params.params].into_iter().flatten() {
        inputs.push(digest(p, slash_path(p))?);
    }
    for p in json_files(&args.scenarios)? {
        inputs.push(digest(&p, slash_path(&p))?);
    }

    let out = &args.out.out;
    let outputs = files_below(out)?
        .into_iter()
        .filter(|p| p != Path::new(MANIFEST_JSON))
        .map(|p| digest(&out.join(&p), slash_path(&p)))
        .collect::<Result<Vec<_>>>()?;

    let mut notes = Vec::new();
    if args.trace.is_none() {
        let source = if args.profile.is_some() { "the given profile" } else { "the built-in city profile" };
        notes.push(format!("trace synthesized from {source}"));
    }
    notes.push("demand counts every observed vehicle, stationary ones included".to_string());
    notes.push("average configurations are taken over the hours with traffic".to_string());
    notes.push(format!("AV safe speeds use the {} deployed configuration", args.kind));
    if !args.scenarios.is_empty() {
        notes.push(TRIP_NOTE.to_string());
    }

    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        seed,
        inputs,
        parameters: model,
        overrides,
        outputs,
        notes,
    };
    let path = out.join(MANIFEST_JSON);
    create_with(&path, |f| {
        serde_json::to_writer_pretty(&mut *f, &manifest)?;
        Ok(std::io::Write::write_all(f, b"\n")?)
    })?;
    eprintln!("wrote {}", path.display());
    Ok(())
}
