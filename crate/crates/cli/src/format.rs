//! Serialization of recomputed tables as CSV, Markdown or JSON.

use std::io;

use clap::ValueEnum;
use serde_json::{Map, Value};
use sterr::numerics::decimal_digits;
use sterr::verify::Table;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Md,
    Json,
}

fn header(table: &Table) -> Vec<&str> {
    std::iter::once(table.index_name)
        .chain(table.columns.iter().copied())
        .collect()
}

/// Cells at `digits` significant digits, capped by each cell's own precision.
fn cells(table: &Table, digits: usize) -> Vec<Vec<String>> {
    table
        .rows
        .iter()
        .map(|row| {
            std::iter::once(row.index.to_string())
                .chain(
                    row.cells
                        .iter()
                        .map(|c| c.to_fixed_string(digits.min(decimal_digits(c.bits())))),
                )
                .collect()
        })
        .collect()
}

pub fn to_csv(table: &Table, digits: usize) -> io::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header(table))?;
    for row in cells(table, digits) {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn to_markdown(table: &Table, digits: usize) -> String {
    let head = header(table);
    let mut out = format!("| {} |\n", head.join(" | "));
    out.push_str(&format!("|{}\n", "---|".repeat(head.len())));
    for row in cells(table, digits) {
        out.push_str(&format!("| {} |\n", row.join(" | ")));
    }
    out
}

/// An array of row objects; numeric cells are decimal strings so no digits are lost.
pub fn to_json(table: &Table, digits: usize) -> String {
    let head = header(table);
    let rows: Vec<Value> = cells(table, digits)
        .into_iter()
        .zip(&table.rows)
        .map(|(row, raw)| {
            let mut obj = Map::new();
            obj.insert(head[0].to_string(), Value::from(raw.index));
            for (name, cell) in head.iter().zip(row).skip(1) {
                obj.insert(name.to_string(), Value::String(cell));
            }
            Value::Object(obj)
        })
        .collect();
    serde_json::to_string_pretty(&rows).expect("table serializes")
}

pub fn render(table: &Table, format: Format, digits: usize) -> io::Result<String> {
    match format {
        Format::Csv => to_csv(table, digits),
        Format::Md => Ok(to_markdown(table, digits)),
        Format::Json => Ok(to_json(table, digits) + "\n"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sterr::verify::published_table;

    #[test]
    fn layouts_share_header_and_values() {
        let t = published_table(3, 192).unwrap();
        let csv = to_csv(&t, 12).unwrap();
        assert!(csv.starts_with("s,kappa_lo,tau_lo,kappa_hi,tau_hi\n"));
        assert_eq!(csv.lines().count(), 9);
        let md = to_markdown(&t, 12);
        assert!(md
            .starts_with("| s | kappa_lo | tau_lo | kappa_hi | tau_hi |\n|---|---|---|---|---|\n"));
        let json: Value = serde_json::from_str(&to_json(&t, 12)).unwrap();
        assert_eq!(json.as_array().unwrap().len(), 8);
        assert_eq!(json[7]["s"], 1000);
        assert_eq!(json[7]["tau_lo"], "-0.00000354620000000");
        assert!(csv.contains("1000,1.00008333680,-0.00000354620000000,"));
    }
}
