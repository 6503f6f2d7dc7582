//! Dataset file formats.
//!
//! Binary layout: magic `"TSDB1\0"`, then `count: u32 LE`, then `length: u32
//! LE`, then `count * length` samples as `f64` little-endian, row-major.
//! Labels, when present, live in a sidecar file at `<path>.labels` holding
//! one integer per line.
//!
//! CSV layout: one series per line, comma-separated samples. In labeled
//! form the first column is the integer class id; the reader must be told
//! via [`DatasetFormat::Csv`] since the column is not self-describing.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::series::{Dataset, TimeSeries};

pub const BINARY_MAGIC: &[u8; 6] = b"TSDB1\0";

/// Extension of the sidecar label file accompanying a binary dataset.
pub const LABEL_SIDECAR_SUFFIX: &str = ".labels";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    Binary,
    Csv { labeled: bool },
}

impl DatasetFormat {
    /// Guess from the file extension: `.csv` means CSV, anything else binary.
    pub fn from_path(path: &Path, csv_labeled: bool) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => DatasetFormat::Csv {
                labeled: csv_labeled,
            },
            _ => DatasetFormat::Binary,
        }
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(LABEL_SIDECAR_SUFFIX);
    PathBuf::from(s)
}

pub fn load_dataset(path: &Path, format: DatasetFormat) -> Result<Dataset<f64>> {
    match format {
        DatasetFormat::Binary => load_binary(path),
        DatasetFormat::Csv { labeled } => load_csv(path, labeled),
    }
}

pub fn save_dataset(ds: &Dataset<f64>, path: &Path, format: DatasetFormat) -> Result<()> {
    match format {
        DatasetFormat::Binary => save_binary(ds, path),
        DatasetFormat::Csv { labeled } => save_csv(ds, path, labeled),
    }
}

fn bad_file(path: &Path, message: impl Into<String>) -> Error {
    Error::BadFile {
        path: path.to_owned(),
        message: message.into(),
    }
}

fn load_binary(path: &Path) -> Result<Dataset<f64>> {
    let mut reader = BufReader::new(File::open(path)?);

    let mut magic = [0u8; 6];
    reader
        .read_exact(&mut magic)
        .map_err(|_| bad_file(path, "file too short for magic bytes"))?;
    if &magic != BINARY_MAGIC {
        return Err(bad_file(path, "bad magic bytes"));
    }

    let mut word = [0u8; 4];
    reader
        .read_exact(&mut word)
        .map_err(|_| bad_file(path, "missing series count"))?;
    let count = u32::from_le_bytes(word) as usize;
    reader
        .read_exact(&mut word)
        .map_err(|_| bad_file(path, "missing series length"))?;
    let n = u32::from_le_bytes(word) as usize;

    if count == 0 {
        return Err(Error::EmptyDataset);
    }
    if n == 0 {
        return Err(bad_file(path, "series length is zero"));
    }

    let mut series = Vec::with_capacity(count);
    let mut buf = vec![0u8; n * 8];
    for row in 0..count {
        reader.read_exact(&mut buf).map_err(|_| {
            bad_file(path, format!("truncated sample data at row {row}"))
        })?;
        let mut samples = Vec::with_capacity(n);
        for (col, chunk) in buf.chunks_exact(8).enumerate() {
            let v = f64::from_le_bytes(chunk.try_into().expect("exact chunk"));
            if !v.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
            samples.push(v);
        }
        series.push(TimeSeries::new_unchecked(samples));
    }
    let mut trailing = [0u8; 1];
    if reader.read(&mut trailing)? != 0 {
        return Err(bad_file(path, "trailing bytes after sample data"));
    }

    let labels = load_labels_if_present(path, count)?;
    Dataset::new(series, labels)
}

fn load_labels_if_present(path: &Path, count: usize) -> Result<Option<Vec<i64>>> {
    let sidecar = sidecar_path(path);
    if !sidecar.exists() {
        return Ok(None);
    }
    let reader = BufReader::new(File::open(&sidecar)?);
    let mut labels = Vec::with_capacity(count);
    for (row, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        labels.push(t.parse::<i64>().map_err(|e| Error::Parse {
            row: row + 1,
            message: format!("bad label {t:?}: {e}"),
        })?);
    }
    if labels.len() != count {
        return Err(bad_file(
            &sidecar,
            format!("expected {count} labels, found {}", labels.len()),
        ));
    }
    Ok(Some(labels))
}

fn save_binary(ds: &Dataset<f64>, path: &Path) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    writer.write_all(BINARY_MAGIC)?;
    writer.write_all(&(ds.len() as u32).to_le_bytes())?;
    writer.write_all(&(ds.series_len() as u32).to_le_bytes())?;
    for s in ds.iter() {
        for v in s.samples() {
            writer.write_all(&v.to_le_bytes())?;
        }
    }
    writer.flush()?;

    if let Some(labels) = ds.labels() {
        let mut writer = BufWriter::new(File::create(sidecar_path(path))?);
        for l in labels {
            writeln!(writer, "{l}")?;
        }
        writer.flush()?;
    }
    Ok(())
}

fn load_csv(path: &Path, labeled: bool) -> Result<Dataset<f64>> {
    let reader = BufReader::new(File::open(path)?);
    let mut series = Vec::new();
    let mut labels = if labeled { Some(Vec::new()) } else { None };
    let mut expected_len: Option<usize> = None;

    for (idx, line) in reader.lines().enumerate() {
        let row = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        if let Some(labels) = labels.as_mut() {
            let field = fields.next().expect("split yields at least one field");
            labels.push(field.trim().parse::<i64>().map_err(|e| Error::Parse {
                row,
                message: format!("bad class id {:?}: {e}", field.trim()),
            })?);
        }
        let mut samples = Vec::new();
        for field in fields {
            let t = field.trim();
            let v: f64 = t.parse().map_err(|e| Error::Parse {
                row,
                message: format!("bad sample {t:?}: {e}"),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row,
                    col: samples.len(),
                });
            }
            samples.push(v);
        }
        if samples.is_empty() {
            return Err(Error::Parse {
                row,
                message: "row has no samples".into(),
            });
        }
        match expected_len {
            None => expected_len = Some(samples.len()),
            Some(n) if n != samples.len() => {
                return Err(Error::Parse {
                    row,
                    message: format!("ragged row: expected {n} samples, found {}", samples.len()),
                })
            }
            _ => {}
        }
        series.push(TimeSeries::new_unchecked(samples));
    }
    if series.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Dataset::new(series, labels)
}

fn save_csv(ds: &Dataset<f64>, path: &Path, labeled: bool) -> Result<()> {
    if labeled && ds.labels().is_none() {
        return Err(Error::InvalidParameter(
            "labeled CSV requested but dataset has no labels".into(),
        ));
    }
    let mut writer = BufWriter::new(File::create(path)?);
    for (i, s) in ds.iter().enumerate() {
        if labeled {
            write!(writer, "{},", ds.labels().expect("checked above")[i])?;
        }
        let mut first = true;
        for v in s.samples() {
            if !first {
                write!(writer, ",")?;
            }
            // `{}` prints the shortest representation that round-trips f64.
            write!(writer, "{v}")?;
            first = false;
        }
        writeln!(writer)?;
    }
    writer.flush()?;
    Ok(())
}
