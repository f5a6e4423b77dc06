//! JSON Lines persistence for the reference dataset — the interchange format
//! between the extraction and validation pipelines.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::annotate::{DatasetRecord, ReferenceDataset, SkippedLine};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: invalid dataset row: {detail}")]
    BadRow { path: String, line: usize, detail: String },
}

fn io_err(path: &Path, source: std::io::Error) -> DatasetError {
    DatasetError::Io { path: path.display().to_string(), source }
}

/// Writes records as JSON Lines: `{"id":…,"log_record":…,"log":…,"ttl":…}`.
pub fn write_records(path: &Path, records: &[DatasetRecord]) -> Result<(), DatasetError> {
    let mut out = Vec::new();
    for record in records {
        serde_json::to_writer(&mut out, record).expect("record is serializable");
        out.push(b'\n');
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Reads a JSON Lines dataset file back into records.
pub fn read_records(path: &Path) -> Result<Vec<DatasetRecord>, DatasetError> {
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut records = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: DatasetRecord =
            serde_json::from_str(&line).map_err(|e| DatasetError::BadRow {
                path: path.display().to_string(),
                line: idx + 1,
                detail: e.to_string(),
            })?;
        records.push(record);
    }
    Ok(records)
}

/// Writes the skip report: totals plus the reason per skipped line.
pub fn write_skip_report(
    path: &Path,
    dataset: &ReferenceDataset,
    blank_lines: &[u64],
) -> Result<(), DatasetError> {
    let mut skips: Vec<SkippedLine> = dataset.skips.clone();
    skips.extend(blank_lines.iter().map(|&entry_id| SkippedLine {
        entry_id,
        reason: "blank line".to_string(),
    }));
    skips.sort_by_key(|s| s.entry_id);
    let report = serde_json::json!({
        "records": dataset.records.len(),
        "skipped": skips.len(),
        "skips": skips,
    });
    let mut file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    let text = serde_json::to_string_pretty(&report).expect("report is serializable");
    file.write_all(text.as_bytes()).map_err(|e| io_err(path, e))?;
    file.write_all(b"\n").map_err(|e| io_err(path, e))
}
