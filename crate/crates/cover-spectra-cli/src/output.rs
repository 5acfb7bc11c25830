use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::CliError;

/// Tab-separated table with a `#`-prefixed header line.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_tsv(&self) -> String {
        let mut s = format!("#{}\n", self.columns.join("\t"));
        for r in &self.rows {
            s.push_str(&r.join("\t"));
            s.push('\n');
        }
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!("| {} |\n", self.columns.join(" | "));
        let _ = writeln!(s, "|{}", "---|".repeat(self.columns.len()));
        for r in &self.rows {
            let _ = writeln!(s, "| {} |", r.join(" | "));
        }
        s
    }
}

pub fn f(x: f64) -> String {
    format!("{x:.10}")
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

/// Writes `body` to `out` (and the config sidecar next to it) or to stdout.
pub fn emit(out: Option<&Path>, command: &str, config: Value, summary: Value, columns: &[&str], body: &str) -> Result<(), CliError> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes()).map_err(|e| CliError::io("stdout", e))?;
        }
        Some(path) => {
            fs::write(path, body).map_err(|e| CliError::io(path.display(), e))?;
            let side = json!({
                "command": command,
                "version": env!("CARGO_PKG_VERSION"),
                "config": config,
                "columns": columns,
                "summary": summary,
            });
            let text = serde_json::to_string_pretty(&side).expect("json values serialize") + "\n";
            let sp = sidecar_path(path);
            fs::write(&sp, text).map_err(|e| CliError::io(sp.display(), e))?;
        }
    }
    Ok(())
}
