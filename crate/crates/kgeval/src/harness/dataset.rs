//! JSONL dataset ingestion with per-line diagnostics.

use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::EvaluationRecord;

/// What went wrong (and where) while loading a dataset.
#[derive(Debug, Clone, Default)]
pub struct DatasetDiagnostics {
    /// Non-blank lines seen.
    pub total_lines: usize,
    /// (line number, problem) for every unusable line.
    pub malformed: Vec<(usize, String)>,
}

impl DatasetDiagnostics {
    pub fn malformed_fraction(&self) -> f64 {
        if self.total_lines == 0 {
            0.0
        } else {
            self.malformed.len() as f64 / self.total_lines as f64
        }
    }
}

/// A parsed dataset plus its load diagnostics.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub records: Vec<EvaluationRecord>,
    pub diagnostics: DatasetDiagnostics,
}

/// Read a JSONL dataset. Malformed lines and duplicate ids are counted
/// and logged with their line numbers; the load continues past them.
/// Fails outright only when the file is unreadable or when more than
/// half of the lines are unusable.
pub fn load_dataset(path: &Path) -> Result<LoadedDataset> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Data(format!("cannot open dataset {}: {e}", path.display())))?;
    let reader = BufReader::new(file);

    let mut records: Vec<EvaluationRecord> = Vec::new();
    let mut seen_ids = std::collections::HashSet::new();
    let mut diagnostics = DatasetDiagnostics::default();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Data(format!("read error at line {lineno}: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        diagnostics.total_lines += 1;
        match serde_json::from_str::<EvaluationRecord>(&line) {
            Ok(record) => {
                if record.id.trim().is_empty() {
                    log::warn!("{}:{lineno}: record id is empty", path.display());
                    diagnostics.malformed.push((lineno, "empty record id".to_string()));
                } else if !seen_ids.insert(record.id.clone()) {
                    log::warn!("{}:{lineno}: duplicate record id '{}'", path.display(), record.id);
                    diagnostics
                        .malformed
                        .push((lineno, format!("duplicate record id '{}'", record.id)));
                } else {
                    records.push(record);
                }
            }
            Err(e) => {
                log::warn!("{}:{lineno}: malformed record: {e}", path.display());
                diagnostics.malformed.push((lineno, e.to_string()));
            }
        }
    }

    if diagnostics.total_lines > 0 && diagnostics.malformed_fraction() > 0.5 {
        return Err(Error::Data(format!(
            "{} of {} lines are malformed in {}; aborting",
            diagnostics.malformed.len(),
            diagnostics.total_lines,
            path.display()
        )));
    }
    Ok(LoadedDataset {
        records,
        diagnostics,
    })
}
