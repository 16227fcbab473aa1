//! Tabular output rendering: CSV (RFC-4180-ish, LF line endings) and JSON
//! with a metadata block. All floats are printed with 12 significant digits.

use std::io::Write;

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn single_row(columns: Vec<(&str, Cell)>) -> Self {
        Table {
            header: columns.iter().map(|(name, _)| name.to_string()).collect(),
            rows: vec![columns.into_iter().map(|(_, cell)| cell).collect()],
        }
    }
}

/// Format with 12 significant digits; fixed notation in a sane magnitude
/// range, scientific otherwise.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        format!("{:.*}", (11 - mag).max(0) as usize, x)
    } else {
        format!("{:.11e}", x)
    }
}

fn cell_text(cell: &Cell) -> String {
    match cell {
        Cell::Num(x) => fmt_sig(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Bool(b) => b.to_string(),
        Cell::Text(s) => s.clone(),
    }
}

fn cell_json(cell: &Cell) -> Value {
    match cell {
        // Round-trip through the 12-digit text so CSV and JSON agree.
        Cell::Num(x) => {
            let rounded: f64 = fmt_sig(*x).parse().unwrap_or(*x);
            serde_json::Number::from_f64(rounded)
                .map(Value::Number)
                .unwrap_or_else(|| Value::String(fmt_sig(*x)))
        }
        Cell::Int(i) => json!(i),
        Cell::Bool(b) => json!(b),
        Cell::Text(s) => json!(s),
    }
}

fn csv_quote(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn write_csv(table: &Table, out: &mut dyn Write) -> std::io::Result<()> {
    let header: Vec<String> = table.header.iter().map(|h| csv_quote(h)).collect();
    writeln!(out, "{}", header.join(","))?;
    for row in &table.rows {
        let fields: Vec<String> = row.iter().map(|c| csv_quote(&cell_text(c))).collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn write_json(table: &Table, metadata: Map<String, Value>, out: &mut dyn Write) -> std::io::Result<()> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (name, cell) in table.header.iter().zip(row) {
                obj.insert(name.clone(), cell_json(cell));
            }
            Value::Object(obj)
        })
        .collect();
    let doc = json!({ "metadata": Value::Object(metadata), "rows": rows });
    writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}
