//! JSON-lines persistence. The first line holds [`DatasetMeta`], every
//! further line one [`DataSample`]. Secrets live in a separate JSON file.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{DataSample, Dataset, DatasetMeta, Secrets};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Writes `dataset` as JSON lines to any writer.
pub fn write_dataset<W: Write>(dataset: &Dataset, mut w: W) -> Result<()> {
    serde_json::to_writer(&mut w, &dataset.meta)?;
    w.write_all(b"\n")?;
    for s in &dataset.samples {
        serde_json::to_writer(&mut w, s)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<()> {
    write_dataset(dataset, BufWriter::new(File::create(path)?))
}

fn parse_line<T: serde::de::DeserializeOwned>(line: &str, number: usize) -> Result<T> {
    serde_json::from_str(line).map_err(|e| Error::Parse {
        line: number,
        message: e.to_string(),
    })
}

fn invalid(line: usize, message: String) -> Error {
    Error::Validation(format!("line {line}: {message}"))
}

/// Reads and validates a dataset file.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines().enumerate();
    let meta: DatasetMeta = match lines.next() {
        Some((_, line)) => parse_line(&line?, 1)?,
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty file".into(),
            })
        }
    };
    if meta.schema_version != SCHEMA_VERSION {
        return Err(Error::Validation(format!(
            "unsupported schema version {}",
            meta.schema_version
        )));
    }
    let mut samples = Vec::with_capacity(meta.sample_count);
    let mut last_iteration = 0;
    for (idx, line) in lines {
        let line = line?;
        let number = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let s: DataSample = parse_line(&line, number)?;
        if !(0.0..=1.0).contains(&s.j) {
            return Err(invalid(number, format!("J = {} outside [0, 1]", s.j)));
        }
        if s.graph.n_v() != meta.n_v {
            return Err(invalid(
                number,
                format!("graph has {} vertices, expected {}", s.graph.n_v(), meta.n_v),
            ));
        }
        if !s.graph.is_connected() {
            return Err(invalid(number, "graph is disconnected".into()));
        }
        if s.iteration >= meta.iterations || s.iteration < last_iteration {
            return Err(invalid(number, format!("iteration {} out of order", s.iteration)));
        }
        last_iteration = s.iteration;
        samples.push(s);
    }
    if samples.len() != meta.sample_count {
        return Err(Error::Validation(format!(
            "header announces {} samples, file holds {}",
            meta.sample_count,
            samples.len()
        )));
    }
    Ok(Dataset { meta, samples })
}

pub fn save_secrets(secrets: &Secrets, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, secrets)?;
    w.flush()?;
    Ok(())
}

pub fn load_secrets(path: &Path) -> Result<Secrets> {
    let secrets: Secrets = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    if let Some(d) = secrets.dynamics.iter().find(|d| d.n_v() != secrets.n_v) {
        return Err(Error::Validation(format!(
            "dynamics for {} nodes in a {}-vertex secrets file",
            d.n_v(),
            secrets.n_v
        )));
    }
    Ok(secrets)
}
