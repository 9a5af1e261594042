//! Reading schema descriptors and row data from disk.
//!
//! Rows come either as a directory of `<relation>.csv` files (header row
//! naming the attributes) or as a single JSON object mapping relation names
//! to arrays of records. Scalar JSON values are taken at face value as
//! strings; `null` and `""` both mean null.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::rdb::{RdbError, RelationalSchema, Row, RowSet};

pub fn load_schema(path: &Path) -> Result<RelationalSchema, RdbError> {
    let text = fs::read_to_string(path)?;
    let schema: RelationalSchema = serde_json::from_str(&text)?;
    schema.check()?;
    Ok(schema)
}

pub fn load_rows_json(text: &str) -> Result<RowSet, RdbError> {
    let raw: BTreeMap<String, Vec<BTreeMap<String, serde_json::Value>>> =
        serde_json::from_str(text)?;
    let mut rows = RowSet::new();
    for (relation, records) in raw {
        let converted: Result<Vec<Row>, RdbError> = records
            .into_iter()
            .map(|record| {
                record
                    .into_iter()
                    .map(|(attr, value)| Ok((attr, scalar_to_string(&relation, value)?)))
                    .collect()
            })
            .collect();
        rows.insert(relation, converted?);
    }
    Ok(rows)
}

pub fn load_rows_json_file(path: &Path) -> Result<RowSet, RdbError> {
    load_rows_json(&fs::read_to_string(path)?)
}

fn scalar_to_string(relation: &str, value: serde_json::Value) -> Result<String, RdbError> {
    match value {
        serde_json::Value::String(s) => Ok(s),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        serde_json::Value::Bool(b) => Ok(b.to_string()),
        serde_json::Value::Null => Ok(String::new()),
        other => Err(RdbError::Data(format!(
            "relation `{relation}`: row values must be scalars, got {other}"
        ))),
    }
}

/// Loads every `<relation>.csv` in `dir`. Relations without a file simply
/// have no rows; a CSV file that matches no declared relation is an error.
pub fn load_rows_csv_dir(schema: &RelationalSchema, dir: &Path) -> Result<RowSet, RdbError> {
    let mut rows = RowSet::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("csv") {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        if schema.relation(stem).is_none() {
            return Err(RdbError::UnknownRelation(stem.to_string()));
        }
        rows.insert(stem.to_string(), load_csv(stem, &path)?);
    }
    Ok(rows)
}

fn load_csv(relation: &str, path: &Path) -> Result<Vec<Row>, RdbError> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let unique: std::collections::BTreeSet<&str> =
        headers.iter().map(String::as_str).collect();
    if unique.len() != headers.len() {
        return Err(RdbError::Data(format!(
            "relation `{relation}`: duplicate column in CSV header"
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push(
            headers
                .iter()
                .cloned()
                .zip(record.iter().map(str::to_string))
                .collect(),
        );
    }
    Ok(rows)
}
