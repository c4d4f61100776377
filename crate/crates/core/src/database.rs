//! Classical key-value tables and their quantum encoding.
//!
//! A table of `2^n` rows (already sorted by key) is mapped onto an `n`-qubit
//! register: row `i` becomes basis state `|i⟩`, and each value label is
//! replaced by its 1-based rank among the distinct numeric labels.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatabaseError {
    #[error("database is empty")]
    Empty,
    #[error("database has {0} rows, which is not a power of two >= 2")]
    NotPowerOfTwo(usize),
    #[error("duplicate key {0:?}")]
    DuplicateKey(String),
    #[error("value label {0:?} is not a decimal number")]
    UnparseableValueLabel(String),
    #[error("empty field in row {row}")]
    EmptyField { row: usize },
    #[error("target {0:?} is not stored in the database")]
    TargetNotInDatabase(String),
    #[error("expected {expected} probabilities, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("probability {value} at index {index} is outside [0, 1]")]
    InvalidProbability { index: usize, value: f64 },
    #[error("cannot read database file: {0}")]
    Io(String),
    #[error("malformed database file: {0}")]
    Format(String),
}

/// One row of the classical table before encoding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawEntry {
    pub key: String,
    pub value_label: String,
}

impl RawEntry {
    pub fn new(key: impl Into<String>, value_label: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            value_label: value_label.into(),
        }
    }
}

/// A value label together with its numeric reading and its rank code.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueCode {
    pub label: String,
    pub number: f64,
    pub code: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedDatabase {
    n_qubits: usize,
    values: Vec<f64>,
    keys: Vec<String>,
    /// Distinct labels, ascending by number.
    codebook: Vec<ValueCode>,
    duplicate_values: bool,
}

/// Encoded search target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TargetCode {
    pub code: f64,
    pub in_database: bool,
}

/// A decoded measurement result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub index: usize,
    pub key: String,
    pub probability: f64,
}

fn parse_number(label: &str) -> Result<f64, DatabaseError> {
    let trimmed = label.trim();
    trimmed
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| DatabaseError::UnparseableValueLabel(label.to_string()))
}

fn qubits_for(count: usize) -> Result<usize, DatabaseError> {
    if count == 0 {
        return Err(DatabaseError::Empty);
    }
    if count < 2 || !count.is_power_of_two() {
        return Err(DatabaseError::NotPowerOfTwo(count));
    }
    Ok(count.trailing_zeros() as usize)
}

/// Encodes rows in the given (presorted) order. Value labels get their
/// 1-based rank among the distinct numeric labels.
pub fn encode_database(rows: &[RawEntry]) -> Result<EncodedDatabase, DatabaseError> {
    let n_qubits = qubits_for(rows.len())?;

    let mut seen = HashSet::new();
    let mut numbers = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let key = row.key.trim();
        if key.is_empty() || row.value_label.trim().is_empty() {
            return Err(DatabaseError::EmptyField { row: i });
        }
        if !seen.insert(key.to_string()) {
            return Err(DatabaseError::DuplicateKey(key.to_string()));
        }
        numbers.push(parse_number(&row.value_label)?);
    }

    let mut distinct: Vec<(f64, String)> = Vec::new();
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| numbers[a].total_cmp(&numbers[b]));
    for &i in &order {
        if distinct.last().map_or(true, |(x, _)| *x != numbers[i]) {
            distinct.push((numbers[i], rows[i].value_label.trim().to_string()));
        }
    }
    let duplicate_values = distinct.len() != rows.len();
    let codebook: Vec<ValueCode> = distinct
        .into_iter()
        .enumerate()
        .map(|(rank, (number, label))| ValueCode {
            label,
            number,
            code: (rank + 1) as f64,
        })
        .collect();

    let values = numbers
        .iter()
        .map(|x| {
            codebook
                .iter()
                .find(|c| c.number == *x)
                .map(|c| c.code)
                .expect("every number is in the codebook")
        })
        .collect();

    Ok(EncodedDatabase {
        n_qubits,
        values,
        keys: rows.iter().map(|r| r.key.trim().to_string()).collect(),
        codebook,
        duplicate_values,
    })
}

impl EncodedDatabase {
    /// Builds a database directly from already-encoded values. Keys are
    /// `k0`, `k1`, ... and each value is its own label.
    pub fn from_values(values: &[f64]) -> Result<Self, DatabaseError> {
        let rows: Vec<RawEntry> = values
            .iter()
            .enumerate()
            .map(|(i, v)| RawEntry::new(format!("k{i}"), format!("{v}")))
            .collect();
        let mut db = encode_database(&rows)?;
        // keep the given numbers as codes rather than re-ranking them
        db.values = values.to_vec();
        for c in &mut db.codebook {
            c.code = c.number;
        }
        Ok(db)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(index, value)` pairs in index order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().copied().enumerate()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn key(&self, index: usize) -> Option<&str> {
        self.keys.get(index).map(String::as_str)
    }

    pub fn codebook(&self) -> &[ValueCode] {
        &self.codebook
    }

    /// True when two rows share a value label, which turns any search for
    /// that value into a multi-solution search.
    pub fn has_duplicate_values(&self) -> bool {
        self.duplicate_values
    }

    /// Code of a value label. Labels not stored in the table are mapped by
    /// linear interpolation of the rank codebook so that the nearest code
    /// still identifies the nearest stored value.
    pub fn encode_target(&self, value_label: &str) -> Result<TargetCode, DatabaseError> {
        let x = parse_number(value_label)?;
        if let Some(c) = self.codebook.iter().find(|c| c.number == x) {
            return Ok(TargetCode {
                code: c.code,
                in_database: true,
            });
        }
        let book = &self.codebook;
        if book.len() == 1 {
            return Ok(TargetCode {
                code: book[0].code + (x - book[0].number),
                in_database: false,
            });
        }
        let seg = match book.iter().position(|c| c.number > x) {
            Some(0) => 0,
            Some(i) => i - 1,
            None => book.len() - 2,
        };
        let (a, b) = (&book[seg], &book[seg + 1]);
        let code = a.code + (x - a.number) * (b.code - a.code) / (b.number - a.number);
        Ok(TargetCode {
            code,
            in_database: false,
        })
    }

    /// Like [`encode_target`](Self::encode_target) but rejects labels that are
    /// not stored in the table.
    pub fn encode_target_strict(&self, value_label: &str) -> Result<f64, DatabaseError> {
        let t = self.encode_target(value_label)?;
        if !t.in_database {
            return Err(DatabaseError::TargetNotInDatabase(value_label.to_string()));
        }
        Ok(t.code)
    }

    /// Pairs each basis index with its key, most probable first.
    pub fn decode_outcome(&self, probabilities: &[f64]) -> Result<Vec<SearchOutcome>, DatabaseError> {
        if probabilities.len() != self.len() {
            return Err(DatabaseError::LengthMismatch {
                expected: self.len(),
                got: probabilities.len(),
            });
        }
        for (index, &p) in probabilities.iter().enumerate() {
            if !(-1e-12..=1.0 + 1e-12).contains(&p) {
                return Err(DatabaseError::InvalidProbability { index, value: p });
            }
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(DatabaseError::NotNormalized(total));
        }
        let mut out: Vec<SearchOutcome> = probabilities
            .iter()
            .enumerate()
            .map(|(index, &probability)| SearchOutcome {
                index,
                key: self.keys[index].clone(),
                probability,
            })
            .collect();
        out.sort_by(|a, b| b.probability.total_cmp(&a.probability).then(a.index.cmp(&b.index)));
        Ok(out)
    }
}

#[derive(Deserialize)]
struct JsonRow {
    key: String,
    value: serde_json::Value,
}

/// Parses CSV text with a `key,value` header.
pub fn parse_csv(text: &str) -> Result<Vec<RawEntry>, DatabaseError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| DatabaseError::Format(e.to_string()))?
        .clone();
    if headers.len() != 2 || &headers[0] != "key" || &headers[1] != "value" {
        return Err(DatabaseError::Format(format!(
            "expected header `key,value`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| DatabaseError::Format(e.to_string()))?;
        let (key, value) = (&record[0], &record[1]);
        if key.is_empty() || value.is_empty() {
            return Err(DatabaseError::EmptyField { row: i });
        }
        parse_number(value)?;
        rows.push(RawEntry::new(key, value));
    }
    Ok(rows)
}

/// Parses a JSON array of `{key, value}` objects; values may be numbers or
/// numeric strings.
pub fn parse_json(text: &str) -> Result<Vec<RawEntry>, DatabaseError> {
    let raw: Vec<JsonRow> =
        serde_json::from_str(text).map_err(|e| DatabaseError::Format(e.to_string()))?;
    raw.into_iter()
        .enumerate()
        .map(|(i, row)| {
            let value = match row.value {
                serde_json::Value::String(s) => s.trim().to_string(),
                serde_json::Value::Number(n) => n.to_string(),
                other => return Err(DatabaseError::UnparseableValueLabel(other.to_string())),
            };
            let key = row.key.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(DatabaseError::EmptyField { row: i });
            }
            parse_number(&value)?;
            Ok(RawEntry::new(key, value))
        })
        .collect()
}

/// Reads a `.json` or CSV database file.
pub fn load_rows(path: &Path) -> Result<Vec<RawEntry>, DatabaseError> {
    let text = fs::read_to_string(path).map_err(|e| DatabaseError::Io(format!("{}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with('[');
    if is_json {
        parse_json(&text)
    } else {
        parse_csv(&text)
    }
}

/// The four-entry phone book used throughout the examples.
pub const PHONE_BOOK_CSV: &str = include_str!("../fixtures/phone_book.csv");

pub fn phone_book() -> EncodedDatabase {
    encode_database(&parse_csv(PHONE_BOOK_CSV).expect("bundled fixture parses"))
        .expect("bundled fixture encodes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(pairs: &[(&str, &str)]) -> Vec<RawEntry> {
        pairs.iter().map(|(k, v)| RawEntry::new(*k, *v)).collect()
    }

    #[test]
    fn phone_book_codes() {
        let db = phone_book();
        assert_eq!(db.n_qubits(), 2);
        let entries: Vec<_> = db.entries().collect();
        assert_eq!(entries, vec![(0, 4.0), (1, 3.0), (2, 1.0), (3, 2.0)]);
        assert_eq!(db.key(3), Some("David"));
        assert!(!db.has_duplicate_values());
    }

    #[test]
    fn two_rows() {
        let db = encode_database(&rows(&[("A", "100"), ("B", "200")])).unwrap();
        assert_eq!(db.n_qubits(), 1);
        assert_eq!(db.values(), &[1.0, 2.0]);
    }

    #[test]
    fn rejects_bad_sizes_and_keys() {
        let three = rows(&[("A", "1"), ("B", "2"), ("C", "3")]);
        assert_eq!(encode_database(&three), Err(DatabaseError::NotPowerOfTwo(3)));
        assert_eq!(encode_database(&[]), Err(DatabaseError::Empty));
        assert_eq!(
            encode_database(&rows(&[("A", "1")])),
            Err(DatabaseError::NotPowerOfTwo(1))
        );
        assert_eq!(
            encode_database(&rows(&[("A", "1"), ("A", "2")])),
            Err(DatabaseError::DuplicateKey("A".into()))
        );
        assert!(matches!(
            encode_database(&rows(&[("A", "1"), ("B", "x")])),
            Err(DatabaseError::UnparseableValueLabel(_))
        ));
    }

    #[test]
    fn duplicate_values_are_flagged() {
        let db = encode_database(&rows(&[("A", "10"), ("B", "20"), ("C", "20"), ("D", "30")])).unwrap();
        assert!(db.has_duplicate_values());
        assert_eq!(db.values(), &[1.0, 2.0, 2.0, 3.0]);
    }

    #[test]
    fn targets() {
        let db = phone_book();
        assert_eq!(db.encode_target("3601003").unwrap().code, 3.0);
        assert_eq!(db.encode_target("3601002").unwrap().code, 2.0);
        assert_eq!(db.encode_target("3601001").unwrap().code, 1.0);
        assert_eq!(db.encode_target(" 3601004 ").unwrap().code, 4.0);

        let between = db.encode_target("3601002.5").unwrap();
        assert!(!between.in_database);
        assert!((between.code - 2.5).abs() < 1e-9);
        let below = db.encode_target("3601000").unwrap();
        assert!((below.code - 0.0).abs() < 1e-9);
        assert!(matches!(
            db.encode_target_strict("3601000"),
            Err(DatabaseError::TargetNotInDatabase(_))
        ));
        assert!(matches!(
            db.encode_target("phone"),
            Err(DatabaseError::UnparseableValueLabel(_))
        ));
    }

    #[test]
    fn decode() {
        let db = phone_book();
        let out = db.decode_outcome(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!((out[0].index, out[0].key.as_str(), out[0].probability), (3, "David", 1.0));
        let out = db.decode_outcome(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(out[0].key, "Alex");
        let out = db.decode_outcome(&[0.0, 0.014, 0.014, 0.972]).unwrap();
        assert_eq!((out[0].index, out[0].probability), (3, 0.972));
        // ties keep index order
        assert_eq!((out[1].index, out[2].index), (1, 2));

        assert!(matches!(
            db.decode_outcome(&[1.0]),
            Err(DatabaseError::LengthMismatch { expected: 4, got: 1 })
        ));
        assert!(matches!(
            db.decode_outcome(&[0.5, 0.0, 0.0, 0.0]),
            Err(DatabaseError::NotNormalized(_))
        ));
        assert!(matches!(
            db.decode_outcome(&[1.5, -0.5, 0.0, 0.0]),
            Err(DatabaseError::InvalidProbability { .. })
        ));
    }

    #[test]
    fn file_formats() {
        let csv_rows = parse_csv("key,value\n Alex , 3601004\nBob,3601003\n").unwrap();
        assert_eq!(csv_rows[0], RawEntry::new("Alex", "3601004"));
        assert!(matches!(parse_csv("name,number\nA,1\n"), Err(DatabaseError::Format(_))));
        assert!(matches!(
            parse_csv("key,value\nA,\n"),
            Err(DatabaseError::EmptyField { row: 0 })
        ));

        let json_rows = parse_json(r#"[{"key":"A","value":1},{"key":"B","value":"2.5"}]"#).unwrap();
        assert_eq!(json_rows[1], RawEntry::new("B", "2.5"));
        assert!(parse_json(r#"[{"key":"A","value":true}]"#).is_err());
    }
}
