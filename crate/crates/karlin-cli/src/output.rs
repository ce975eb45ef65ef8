//! Result tables and their on-disk formats.
//!
//! Every table is written with a header row and full-precision floats
//! (17 significant digits), so identical runs produce byte-identical
//! files. The JSON form mirrors the CSV exactly: one object per row,
//! keys in column order, values numerically equal to the CSV fields.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::OutputFormat;

#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Flag(bool),
}

impl Cell {
    fn csv(self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Flag(v) => v.to_string(),
        }
    }

    fn json(self) -> serde_json::Value {
        match self {
            Cell::Int(v) => v.into(),
            Cell::Float(v) => v.into(),
            Cell::Flag(v) => v.into(),
        }
    }
}

/// A rectangular result table with named columns.
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|c| c.csv()).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut object = serde_json::Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    object.insert((*name).to_string(), cell.json());
                }
                serde_json::Value::Object(object)
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&rows).expect("table serializes");
        text.push('\n');
        text
    }

    /// Write the table under `dir` as `stem.csv` / `stem.json` for each
    /// requested format, returning the paths written.
    pub fn write(
        &self,
        dir: &Path,
        stem: &str,
        formats: &[OutputFormat],
    ) -> std::io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for format in formats {
            let path = dir.join(format!("{stem}.{}", format.extension()));
            let body = match format {
                OutputFormat::Csv => self.to_csv(),
                OutputFormat::Json => self.to_json(),
            };
            fs::write(&path, body)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Write a serialized report under `dir`, returning its path.
pub fn write_json_report<T: serde::Serialize>(
    dir: &Path,
    stem: &str,
    report: &T,
) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{stem}.json"));
    let mut body = serde_json::to_string_pretty(report).expect("report serializes");
    body.push('\n');
    fs::write(&path, body)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_carry_the_same_rows() {
        let mut table = Table::new(&["rep", "value", "ok"]);
        table.push(vec![Cell::Int(3), Cell::Float(0.25), Cell::Flag(true)]);
        let csv = table.to_csv();
        assert_eq!(csv, "rep,value,ok\n3,2.5000000000000000e-1,true\n");
        let json: serde_json::Value = serde_json::from_str(&table.to_json()).unwrap();
        let row = &json.as_array().unwrap()[0];
        assert_eq!(row["rep"], 3);
        assert_eq!(row["value"], 0.25);
        assert_eq!(row["ok"], true);
        let keys: Vec<&String> = row.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["rep", "value", "ok"]);
    }

    #[test]
    fn float_fields_round_trip_exactly() {
        let value = 7.341_741_338_781_692e-1;
        let text = format!("{value:.16e}");
        assert_eq!(text.parse::<f64>().unwrap(), value);
    }
}
