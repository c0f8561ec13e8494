//! Relation CSV format: UTF-8, first line is the header of variable
//! names, comma-separated, no quoting or escaping. Fields containing
//! commas are indistinguishable from extra columns and are rejected by
//! the arity check. One file per relation; the file stem names the
//! relation.

use std::fs;
use std::path::Path;

use qenum_core::RawRelation;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: empty file, expected a header line")]
    MissingHeader { path: String },
    #[error("{path}:{line}: expected {expected} fields, got {got} (commas inside fields are not supported)")]
    Arity {
        path: String,
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("{path}:{line}: empty field")]
    EmptyField { path: String, line: usize },
}

/// Load one relation. Duplicate rows collapse (keeping first-encounter
/// order, so downstream id assignment is deterministic).
pub fn load_csv(path: &Path) -> Result<RawRelation<String>, CsvError> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CsvError::Io {
        path: display.clone(),
        source,
    })?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(CsvError::MissingHeader {
        path: display.clone(),
    })?;
    let schema: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let arity = schema.len();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "relation".into());

    let mut rows = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
        if fields.len() != arity {
            return Err(CsvError::Arity {
                path: display,
                line: idx + 1,
                expected: arity,
                got: fields.len(),
            });
        }
        if fields.iter().any(|f| f.is_empty()) {
            return Err(CsvError::EmptyField {
                path: display,
                line: idx + 1,
            });
        }
        if seen.insert(fields.clone()) {
            rows.push(fields);
        }
    }
    Ok(RawRelation::new(name, schema, rows))
}

/// Write one relation in the same format.
pub fn write_csv(path: &Path, rel: &RawRelation<String>) -> Result<(), CsvError> {
    let mut text = rel.schema.join(",");
    text.push('\n');
    for row in &rel.rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text).map_err(|source| CsvError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Load every `*.csv` in a directory, sorted by file name.
pub fn load_dir(dir: &Path) -> Result<Vec<RawRelation<String>>, CsvError> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|source| CsvError::Io {
            path: dir.display().to_string(),
            source,
        })?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    paths.sort();
    paths.iter().map(|p| load_csv(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_rows_collapse() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        fs::write(&p, "x,y\na1,b1\na1,b1\n").unwrap();
        let rel = load_csv(&p).unwrap();
        assert_eq!(rel.rows.len(), 1);
        assert_eq!(rel.name, "r");
        assert_eq!(rel.schema, vec!["x".to_string(), "y".to_string()]);
    }

    #[test]
    fn empty_body_is_empty_relation() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        fs::write(&p, "x,y\n").unwrap();
        let rel = load_csv(&p).unwrap();
        assert!(rel.rows.is_empty());
    }

    #[test]
    fn arity_mismatch_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        fs::write(&p, "x,y\na1,b1\na1,b1,c1\n").unwrap();
        let err = load_csv(&p).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":3:"), "line number missing in {msg}");
        assert!(msg.contains("expected 2 fields, got 3"));
    }

    #[test]
    fn paper_table_loads() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        fs::write(&p, "x,y\na1,b1\na1,b2\na1,b3\na2,b1\n").unwrap();
        let rel = load_csv(&p).unwrap();
        assert_eq!(rel.rows.len(), 4);
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        let rel = RawRelation::new(
            "r",
            vec!["x".into(), "y".into()],
            vec![
                vec!["a".into(), "b".into()],
                vec!["c".into(), "d".into()],
            ],
        );
        write_csv(&p, &rel).unwrap();
        let back = load_csv(&p).unwrap();
        assert_eq!(back.rows, rel.rows);
    }
}
