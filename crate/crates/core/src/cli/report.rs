//! Rendering of result rows as aligned tables, CSV, or JSON.

use serde_json::{Map, Value};

use super::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Usage(format!(
                "unknown format `{other}` (expected table, csv or json)"
            ))),
        }
    }
}

/// Rows of one command, with the leading `keys` columns identifying a row.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Map<String, Value>,
    pub columns: Vec<String>,
    pub keys: usize,
    pub rows: Vec<Vec<Value>>,
}

impl Report {
    pub fn new<S: Into<String>>(
        command: &'static str,
        columns: impl IntoIterator<Item = S>,
        keys: usize,
    ) -> Self {
        let columns = columns.into_iter().map(Into::into).collect();
        Report {
            command,
            inputs: Map::new(),
            columns,
            keys,
            rows: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        if self.rows.is_empty() {
            return Err(CliError::Usage("no rows to report".into()));
        }
        Ok(match format {
            Format::Table => self.table(),
            Format::Csv => self.csv()?,
            Format::Json => self.json(),
        })
    }

    /// One row prints its non-key cells as `name=value`, or the bare value if
    /// there is only one; several rows print an aligned table.
    fn table(&self) -> String {
        if let [row] = self.rows.as_slice() {
            let cells: Vec<(&str, String)> = self
                .columns
                .iter()
                .zip(row)
                .skip(self.keys)
                .map(|(c, v)| (c.as_str(), cell_text(v)))
                .collect();
            return match cells.as_slice() {
                [(_, v)] => format!("{v}\n"),
                _ => {
                    let parts: Vec<String> =
                        cells.iter().map(|(c, v)| format!("{c}={v}")).collect();
                    format!("{}\n", parts.join(", "))
                }
            };
        }
        let texts: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(cell_text).collect())
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|k| {
                texts
                    .iter()
                    .map(|r| r[k].chars().count())
                    .chain([self.columns[k].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: Vec<&str>| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            format!("{}\n", padded.join("  ").trim_end())
        };
        let mut out = line(self.columns.iter().map(String::as_str).collect());
        for r in &texts {
            out.push_str(&line(r.iter().map(String::as_str).collect()));
        }
        out
    }

    fn csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r.iter().map(cell_text)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    fn json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .map(|c| c.to_string())
                        .zip(r.iter().cloned())
                        .collect(),
                )
            })
            .collect();
        let mut top = Map::new();
        top.insert("command".into(), self.command.into());
        top.insert("inputs".into(), Value::Object(self.inputs.clone()));
        top.insert("rows".into(), rows.into());
        top.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        let mut s =
            serde_json::to_string_pretty(&Value::Object(top)).expect("json values serialize");
        s.push('\n');
        s
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => "n/a".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        let mut r = Report::new("mu", vec!["p", "mu"], 1);
        r.input("poly", "x^2+y^2");
        r.push(vec![json!(3), json!(3)]);
        r
    }

    #[test]
    fn single_cell_is_bare() {
        assert_eq!(sample().render(Format::Table).unwrap(), "3\n");
    }

    #[test]
    fn single_row_is_key_value() {
        let mut r = Report::new("delsarte", vec!["p", "e_A", "height"], 1);
        r.push(vec![json!(19), json!(10), json!("inf")]);
        assert_eq!(r.render(Format::Table).unwrap(), "e_A=10, height=inf\n");
    }

    #[test]
    fn aligned_table_and_csv_quoting() {
        let mut r = Report::new("fpt", vec!["p", "fpt"], 1);
        r.push(vec![json!(3), json!("[5/9, 2/3]")]);
        r.push(vec![json!(11), Value::Null]);
        assert_eq!(
            r.render(Format::Table).unwrap(),
            "p   fpt\n3   [5/9, 2/3]\n11  n/a\n"
        );
        assert_eq!(
            r.render(Format::Csv).unwrap(),
            "p,fpt\n3,\"[5/9, 2/3]\"\n11,n/a\n"
        );
    }

    #[test]
    fn json_schema() {
        let v: Value = serde_json::from_str(&sample().render(Format::Json).unwrap()).unwrap();
        assert_eq!(v["command"], "mu");
        assert_eq!(v["inputs"]["poly"], "x^2+y^2");
        assert_eq!(v["rows"][0]["mu"], 3);
        assert!(v["version"].is_string());
    }

    #[test]
    fn empty_report_is_an_error() {
        let r = Report::new("mu", vec!["p", "mu"], 1);
        assert!(matches!(r.render(Format::Json), Err(CliError::Usage(_))));
    }
}
