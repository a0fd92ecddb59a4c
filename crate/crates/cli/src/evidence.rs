//! Evidence streams: newline-delimited records, parsed completely before a
//! replay starts so format errors never abort half-way.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvidenceRecord {
    pub tick: u64,
    #[serde(default)]
    pub signals: BTreeMap<String, f64>,
    pub checks_done: Option<u64>,
}

pub fn load_evidence(path: &Path) -> Result<Vec<EvidenceRecord>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut records = Vec::new();
    for (index, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: EvidenceRecord = serde_json::from_str(line)
            .map_err(|e| CliError::Format(format!("{} line {}: {e}", path.display(), index + 1)))?;
        records.push(record);
    }
    Ok(records)
}
