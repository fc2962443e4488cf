//! Output files. Every file carries the full run specification and a
//! SHA-256 of its data content: JSON documents as top-level `run_spec` and
//! `content_sha256` keys next to the result fields, CSV files as two
//! leading `#` comment lines before the header row.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};
use crate::spec::RunSpec;

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Writes files into one output directory, stamping each with the spec.
pub struct Emitter {
    dir: PathBuf,
    spec: Value,
}

impl Emitter {
    pub fn new(spec: &RunSpec) -> Result<Self> {
        let dir = PathBuf::from(&spec.out_dir);
        fs::create_dir_all(&dir).map_err(|e| LabError::Validation(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Emitter {
            dir,
            spec: serde_json::to_value(spec)?,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// `body` must serialize to a JSON object; its fields are written at
    /// top level. The hash covers the compact serialization of `body`
    /// (keys sorted).
    pub fn write_json(&self, name: &str, body: &impl Serialize) -> Result<PathBuf> {
        let value = serde_json::to_value(body)?;
        let Value::Object(fields) = value else {
            return Err(LabError::Validation(format!("{name}: result is not a JSON object")));
        };
        let hash = sha256_hex(serde_json::to_string(&Value::Object(fields.clone()))?.as_bytes());
        let mut doc = Map::new();
        doc.insert("run_spec".into(), self.spec.clone());
        doc.insert("content_sha256".into(), Value::String(hash));
        for (k, v) in fields {
            doc.insert(k, v);
        }
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(&Value::Object(doc))?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }

    /// Header plus rows; the hash covers the CSV text after the comments.
    pub fn write_csv<R: IntoIterator<Item = Vec<f64>>>(&self, name: &str, header: &[&str], rows: R) -> Result<PathBuf> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row.iter().map(|v| format_float(*v)))?;
        }
        let data = w.into_inner().map_err(|e| LabError::Validation(format!("csv: {e}")))?;
        let mut text = format!(
            "# run_spec: {}\n# content_sha256: {}\n",
            serde_json::to_string(&self.spec)?,
            sha256_hex(&data)
        );
        text.push_str(std::str::from_utf8(&data).expect("csv output is UTF-8"));
        let path = self.dir.join(name);
        fs::write(&path, text)?;
        Ok(path)
    }
}

/// Shortest round-trip representation, `.` decimal separator.
fn format_float(v: f64) -> String {
    if v.is_finite() && v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

/// Header and numeric rows of a CSV file written by [`Emitter::write_csv`].
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let header = rdr.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| LabError::Validation(format!("{}: {e}", path.display()))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Recompute the content hash of a CSV file written by [`Emitter::write_csv`]
/// and compare it with the recorded one.
pub fn csv_hash_matches(path: &Path) -> Result<bool> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.splitn(3, '\n');
    let _spec = lines.next();
    let recorded = lines
        .next()
        .and_then(|l| l.strip_prefix("# content_sha256: "))
        .ok_or_else(|| LabError::Validation("missing hash line".into()))?
        .to_string();
    let data = lines.next().unwrap_or("");
    Ok(sha256_hex(data.as_bytes()) == recorded)
}

/// Same check for a JSON document written by [`Emitter::write_json`].
pub fn json_hash_matches(path: &Path) -> Result<bool> {
    let mut doc: Map<String, Value> = serde_json::from_str(&fs::read_to_string(path)?)?;
    doc.remove("run_spec");
    let recorded = doc
        .remove("content_sha256")
        .and_then(|v| v.as_str().map(String::from))
        .ok_or_else(|| LabError::Validation("missing content_sha256".into()))?;
    Ok(sha256_hex(serde_json::to_string(&Value::Object(doc))?.as_bytes()) == recorded)
}
