//! Tables, artifacts and the run manifest.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Numeric table with a fixed column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    columns: &'a [&'static str],
    rows: &'a [Vec<f64>],
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    /// Seventeen significant digits, so values round-trip.
    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            for (k, v) in r.iter().enumerate() {
                if k > 0 {
                    s.push(',');
                }
                write!(s, "{v:.16e}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let t = JsonTable {
            columns: &self.columns,
            rows: &self.rows,
        };
        serde_json::to_string(&t).expect("finite table") + "\n"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn table(stem: &str, t: &Table, format: Format) -> Self {
        match format {
            Format::Csv => Self {
                file: format!("{stem}.csv"),
                bytes: t.to_csv().into_bytes(),
            },
            Format::Json => Self {
                file: format!("{stem}.json"),
                bytes: t.to_json().into_bytes(),
            },
        }
    }

    pub fn json<T: Serialize>(stem: &str, value: &T) -> Self {
        Self {
            file: format!("{stem}.json"),
            bytes: (serde_json::to_string_pretty(value).expect("serializable output") + "\n").into_bytes(),
        }
    }

    pub fn sha256(&self) -> String {
        sha256_hex(&self.bytes)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArtifactRecord {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub name: String,
    pub kind: String,
    pub seed: u64,
    pub config_sha256: String,
    pub version: String,
    pub format: Format,
    pub artifacts: Vec<ArtifactRecord>,
    /// Wall-clock time, present only when requested: it would make
    /// otherwise identical runs differ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> Result<(), RunError> {
    std::fs::create_dir_all(dir)?;
    for a in artifacts {
        std::fs::write(dir.join(&a.file), &a.bytes)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![0.1, -1.0 / 3.0]);
        let csv = t.to_csv();
        let line = csv.lines().nth(1).unwrap();
        let back: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(back, vec![0.1, -1.0 / 3.0]);
        assert!(csv.starts_with("a,b\n"));
    }
}
