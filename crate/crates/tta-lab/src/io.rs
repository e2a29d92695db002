//! Prediction-file ingestion and writing.
//!
//! CSV schema: header `sample_id,label,pred_<name_1>,…,pred_<name_m>`, one
//! row per sample. JSON schema: object with a `labels` array and a
//! `predictions` object mapping augmentation name → array. In both formats
//! the column order defines the augmentation index order.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::data::PredictionSet;
use crate::error::{Error, Result};

/// On-disk format of a prediction file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Csv,
    Json,
}

impl FileFormat {
    /// Infer from the file extension; defaults to CSV when unrecognized.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => FileFormat::Json,
            _ => FileFormat::Csv,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            FileFormat::Csv => "csv",
            FileFormat::Json => "json",
        }
    }
}

/// Load a prediction file, reporting the offending row/column on failure.
pub fn load_predictions(path: &Path, format: FileFormat) -> Result<PredictionSet> {
    match format {
        FileFormat::Csv => load_csv(path),
        FileFormat::Json => load_json(path),
    }
}

fn parse_cell(raw: &str, location: &str) -> Result<f64> {
    let value: f64 = raw
        .trim()
        .parse()
        .map_err(|_| Error::NonNumericCell(location.to_string()))?;
    if !value.is_finite() {
        return Err(Error::NonNumericCell(location.to_string()));
    }
    Ok(value)
}

fn load_csv(path: &Path) -> Result<PredictionSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)?;
    let mut records = reader.records();

    let header = match records.next() {
        Some(rec) => rec?,
        None => return Err(Error::EmptyFile),
    };
    if header.get(0).map(str::trim) != Some("sample_id") {
        return Err(Error::MissingColumn("sample_id".into()));
    }
    if header.get(1).map(str::trim) != Some("label") {
        return Err(Error::MissingColumn("label".into()));
    }
    let mut names = Vec::new();
    for idx in 2..header.len() {
        let cell = header.get(idx).unwrap_or("").trim();
        match cell.strip_prefix("pred_") {
            Some(name) if !name.is_empty() => names.push(name.to_string()),
            _ => {
                return Err(Error::MissingColumn(format!(
                    "header column {} must be pred_<name>, got {:?}",
                    idx + 1,
                    cell
                )))
            }
        }
    }
    if names.is_empty() {
        return Err(Error::MissingColumn(
            "at least one pred_<name> column".into(),
        ));
    }

    let width = header.len();
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (data_idx, rec) in records.enumerate() {
        let rec = rec?;
        let line = data_idx + 2; // 1-based, header is line 1
        if rec.len() != width {
            return Err(Error::RaggedRows(format!(
                "row {} has {} fields, expected {}",
                line,
                rec.len(),
                width
            )));
        }
        labels.push(parse_cell(
            rec.get(1).unwrap(),
            &format!("row {}, column label", line),
        )?);
        let mut row = Vec::with_capacity(names.len());
        for (j, name) in names.iter().enumerate() {
            row.push(parse_cell(
                rec.get(j + 2).unwrap(),
                &format!("row {}, column pred_{}", line, name),
            )?);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile);
    }
    PredictionSet::new(labels, rows, names)
}

fn json_number(value: &Value, location: &str) -> Result<f64> {
    let number = value
        .as_f64()
        .ok_or_else(|| Error::NonNumericCell(location.to_string()))?;
    if !number.is_finite() {
        return Err(Error::NonNumericCell(location.to_string()));
    }
    Ok(number)
}

fn load_json(path: &Path) -> Result<PredictionSet> {
    let text = fs::read_to_string(path)?;
    if text.trim().is_empty() {
        return Err(Error::EmptyFile);
    }
    let value: Value = serde_json::from_str(&text)?;
    let object = value
        .as_object()
        .ok_or_else(|| Error::MissingColumn("top-level object".into()))?;

    let labels_value = object
        .get("labels")
        .ok_or_else(|| Error::MissingColumn("labels".into()))?
        .as_array()
        .ok_or_else(|| Error::MissingColumn("labels (must be an array)".into()))?;
    let mut labels = Vec::with_capacity(labels_value.len());
    for (i, v) in labels_value.iter().enumerate() {
        labels.push(json_number(v, &format!("labels[{}]", i))?);
    }

    let predictions = object
        .get("predictions")
        .ok_or_else(|| Error::MissingColumn("predictions".into()))?
        .as_object()
        .ok_or_else(|| Error::MissingColumn("predictions (must be an object)".into()))?;
    if predictions.is_empty() {
        return Err(Error::MissingColumn(
            "predictions (at least one augmentation)".into(),
        ));
    }

    let n = labels.len();
    let mut names = Vec::with_capacity(predictions.len());
    let mut columns = Vec::with_capacity(predictions.len());
    for (name, column_value) in predictions {
        let column = column_value
            .as_array()
            .ok_or_else(|| Error::NonNumericCell(format!("predictions.{}", name)))?;
        if column.len() != n {
            return Err(Error::RaggedRows(format!(
                "predictions.{} has {} entries, labels has {}",
                name,
                column.len(),
                n
            )));
        }
        let mut parsed = Vec::with_capacity(n);
        for (i, v) in column.iter().enumerate() {
            parsed.push(json_number(v, &format!("predictions.{}[{}]", name, i))?);
        }
        names.push(name.clone());
        columns.push(parsed);
    }

    let rows: Vec<Vec<f64>> = (0..n)
        .map(|s| columns.iter().map(|c| c[s]).collect())
        .collect();
    PredictionSet::new(labels, rows, names)
}

/// Write a prediction file in the schema `load_predictions` reads. Floats
/// use the shortest round-trip-exact decimal form, so a load of the written
/// file reproduces the input bit for bit.
pub fn write_predictions(data: &PredictionSet, path: &Path, format: FileFormat) -> Result<()> {
    match format {
        FileFormat::Csv => write_csv(data, path),
        FileFormat::Json => write_json(data, path),
    }
}

fn write_csv(data: &PredictionSet, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["sample_id".to_string(), "label".to_string()];
    for name in data.augmentation_names() {
        header.push(format!("pred_{}", name));
    }
    writer.write_record(&header)?;
    for s in 0..data.n_samples() {
        let mut record = vec![(s + 1).to_string(), format!("{}", data.labels()[s])];
        for i in 0..data.n_augmentations() {
            record.push(format!("{}", data.predictions()[(s, i)]));
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

fn write_json(data: &PredictionSet, path: &Path) -> Result<()> {
    let labels: Vec<Value> = data.labels().iter().map(|v| json_float(*v)).collect();
    let mut predictions = Map::new();
    for (i, name) in data.augmentation_names().iter().enumerate() {
        let column: Vec<Value> = (0..data.n_samples())
            .map(|s| json_float(data.predictions()[(s, i)]))
            .collect();
        predictions.insert(name.clone(), Value::Array(column));
    }
    let mut root = Map::new();
    root.insert("labels".into(), Value::Array(labels));
    root.insert("predictions".into(), Value::Object(predictions));
    let mut file = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, &Value::Object(root))?;
    file.write_all(b"\n")?;
    Ok(())
}

fn json_float(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}
