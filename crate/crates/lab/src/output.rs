//! Deterministic output: CSV built row by row with shortest-roundtrip
//! float formatting, JSON via serde with declaration-ordered fields.
//! Same config + seed means byte-identical files.

use anyhow::{Context, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::{ExperimentConfig, OutFormat};

pub struct Csv {
    header: String,
    rows: Vec<String>,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Csv { header: header.to_string(), rows: Vec::new() }
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, fields: I) {
        let mut line = String::new();
        for (i, f) in fields.into_iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            debug_assert!(!f.contains(','), "CSV fields must not contain commas");
            let _ = write!(line, "{f}");
        }
        self.rows.push(line);
    }

    pub fn to_string(&self) -> String {
        let mut out = self.header.clone();
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

pub fn write_text(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Writes the CSV and the summary JSON into the output directory (when
/// given) and prints the format-selected artifact on stdout.
pub fn emit(
    cfg: &ExperimentConfig,
    stem: &str,
    csv: Option<&Csv>,
    summary: &serde_json::Value,
) -> Result<()> {
    let json_text = format!("{}\n", serde_json::to_string_pretty(summary)?);
    if let Some(dir) = &cfg.out {
        if let Some(csv) = csv {
            write_text(dir, &format!("{stem}.csv"), &csv.to_string())?;
        }
        write_text(dir, &format!("{stem}_summary.json"), &json_text)?;
    }
    match cfg.format {
        OutFormat::Json => print!("{json_text}"),
        OutFormat::Csv => {
            if let Some(csv) = csv {
                print!("{}", csv.to_string());
            } else {
                print!("{json_text}");
            }
        }
    }
    Ok(())
}

/// Writes JSONL event streams next to the other artifacts.
pub fn emit_jsonl(cfg: &ExperimentConfig, name: &str, content: &str) -> Result<()> {
    if let Some(dir) = &cfg.out {
        write_text(dir, name, content)?;
    }
    Ok(())
}
