//! Tabular reports rendered as CSV (with a `#` comment header) or JSON.

use std::io::Write;

use clap::ValueEnum;
use recgame_core::scalar::format_float;
use recgame_core::{format_scalar, Scalar};
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One table cell: its CSV text and its JSON value.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub text: String,
    pub json: Value,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Cell {
        let text = s.into();
        Cell {
            json: Value::String(text.clone()),
            text,
        }
    }

    pub fn int(n: impl Into<u128> + Copy) -> Cell {
        let n: u128 = n.into();
        Cell {
            text: n.to_string(),
            json: json!(n),
        }
    }

    pub fn float(v: f64) -> Cell {
        Cell {
            text: format_float(v),
            json: json!(v),
        }
    }

    /// Exact values become `{"exact": "p/q", "value": f64}` in JSON.
    pub fn scalar<S: Scalar>(v: &S) -> Cell {
        let json = if S::EXACT {
            json!({"exact": v.to_string(), "value": v.to_f64()})
        } else {
            json!(v.to_f64())
        };
        Cell {
            text: format_scalar(v),
            json,
        }
    }

    pub fn flag(b: bool) -> Cell {
        Cell {
            text: b.to_string(),
            json: Value::Bool(b),
        }
    }

    pub fn empty() -> Cell {
        Cell {
            text: String::new(),
            json: Value::Null,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub seed: u64,
    /// Run parameters and summary values, in insertion order.
    pub meta: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new<I, T>(command: &'static str, seed: u64, columns: I) -> Report
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        Report {
            command,
            seed,
            meta: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: Cell) {
        self.meta.push((key.into(), value));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render<W: Write + ?Sized>(&self, format: Format, out: &mut W) -> std::io::Result<()> {
        match format {
            Format::Csv => self.render_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
                writeln!(out)
            }
        }
    }

    fn render_csv<W: Write + ?Sized>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "# recgame {}", self.command)?;
        writeln!(out, "# seed: {}", self.seed)?;
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {}", v.text)?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.text.as_str()))?;
        }
        w.flush()
    }

    pub fn to_json(&self) -> Value {
        let mut root = Map::new();
        root.insert("command".into(), json!(self.command));
        root.insert("seed".into(), json!(self.seed));
        for (k, v) in &self.meta {
            root.insert(k.clone(), v.json.clone());
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(row)
                        .map(|(c, cell)| (c.clone(), cell.json.clone()))
                        .collect(),
                )
            })
            .collect();
        root.insert("rows".into(), Value::Array(rows));
        Value::Object(root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use recgame_core::Rational;

    #[test]
    fn csv_has_comment_header() {
        let mut r = Report::new("pne", 7, ["profile", "welfare"]);
        r.meta("mediator", Cell::text("shapley"));
        r.push(vec![Cell::text("l2,l3"), Cell::scalar(&Rational::new(13, 5))]);
        let mut buf = Vec::new();
        r.render(Format::Csv, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# recgame pne\n# seed: 7\n# mediator: shapley\nprofile,welfare\n\"l2,l3\",13/5 (2.600000000000)\n"
        );
    }

    #[test]
    fn json_rows_are_keyed_by_column() {
        let mut r = Report::new("pne", 0, ["profile", "welfare"]);
        r.push(vec![Cell::text("l2,l3"), Cell::scalar(&2.5f64)]);
        let v = r.to_json();
        assert_eq!(v["seed"], 0);
        assert_eq!(v["rows"][0]["welfare"], 2.5);
    }
}
