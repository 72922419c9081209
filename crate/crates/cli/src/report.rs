//! Tabular reports rendered as JSON, CSV, markdown or aligned text.

use clap::ValueEnum;
use serde_json::{Map, Value};

pub const SCHEMA: &str = "zclass-kit/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Md,
    Table,
}

pub struct Report {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub json: Value,
}

impl Report {
    pub fn new(title: String, columns: &[&str]) -> Self {
        Report { title, columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), json: Value::Null }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.render_json(),
            Format::Csv => self.render_csv(),
            Format::Md => self.render_md(),
            Format::Table => self.render_table(),
        }
    }

    fn render_json(&self) -> String {
        let mut obj = Map::new();
        obj.insert("schema".into(), Value::String(SCHEMA.into()));
        match &self.json {
            Value::Object(m) => obj.extend(m.clone()),
            other => {
                obj.insert("data".into(), other.clone());
            }
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("values serialize");
        s.push('\n');
        s
    }

    fn render_csv(&self) -> String {
        let line = |cells: &[String]| cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",") + "\n";
        let mut s = line(&self.columns);
        for r in &self.rows {
            s += &line(r);
        }
        s
    }

    fn render_md(&self) -> String {
        let line = |cells: &[String]| format!("| {} |\n", cells.iter().map(|c| c.replace('|', "\\|")).collect::<Vec<_>>().join(" | "));
        let mut s = format!("**{}**\n\n", self.title);
        s += &line(&self.columns);
        s += &format!("|{}\n", "---|".repeat(self.columns.len()));
        for r in &self.rows {
            s += &line(r);
        }
        s
    }

    fn render_table(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut s = format!("{}\n", self.title);
        s += &line(&self.columns);
        s += &line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>());
        for r in &self.rows {
            s += &line(r);
        }
        s
    }
}

fn csv_field(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}
