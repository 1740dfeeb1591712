//! CSV tables headed by a `#`-prefixed run manifest.

use std::io::Write;

use crate::error::{Error, Result};

/// Provenance written above every table.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub command: String,
    pub config_path: Option<String>,
    /// Resolved parameters, one `key = value` per line.
    pub parameters: String,
    pub version: String,
    pub timestamp: String,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
}

impl Manifest {
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("# command: {}", self.command),
            format!(
                "# config: {}",
                self.config_path.as_deref().unwrap_or("(none)")
            ),
            format!("# version: {}", self.version),
            format!("# timestamp: {}", self.timestamp),
        ];
        if let Some(s) = self.seed {
            out.push(format!("# seed: {s}"));
        }
        if let Some(t) = self.trials {
            out.push(format!("# trials: {t}"));
        }
        out.push("# parameters:".into());
        out.extend(self.parameters.lines().map(|l| format!("#   {l}")));
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Formats a value for a table cell; missing values are empty.
pub fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.10e}")).unwrap_or_default()
}

pub fn write_table<W: Write>(mut out: W, manifest: &Manifest, table: &Table) -> Result<()> {
    for l in manifest.lines() {
        writeln!(out, "{l}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header).map_err(csv_error)?;
    for r in &table.rows {
        w.write_record(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_precedes_header() {
        let m = Manifest {
            command: "outage".into(),
            config_path: None,
            parameters: "a = 1\nb = \"x\"".into(),
            version: "0.1.0".into(),
            timestamp: "t".into(),
            seed: Some(3),
            trials: None,
        };
        let mut t = Table::new(["gamma0_dB", "value", "err_estimate", "method"]);
        t.push(vec![
            "0".into(),
            cell(Some(0.5)),
            cell(None),
            "exact, cdf".into(),
        ]);
        let mut buf = Vec::new();
        write_table(&mut buf, &m, &t).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body[0], "gamma0_dB,value,err_estimate,method");
        assert_eq!(body[1], "0,5.0000000000e-1,,\"exact, cdf\"");
        assert!(text.contains("# seed: 3\n"));
        assert!(text.contains("#   b = \"x\"\n"));
    }
}
