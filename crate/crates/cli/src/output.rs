use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

pub const CONFIG_PREFIX: &str = "# config: ";

/// A numeric table; every dataset produced by one run carries the same config.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Dataset {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    tool: &'static str,
    version: &'static str,
    dataset: &'a str,
    columns: &'a [&'static str],
    rows: usize,
    config: &'a RunConfig,
}

pub fn write_csv<W: Write>(out: W, config: &RunConfig, data: &Dataset) -> Result<(), CliError> {
    let mut out = out;
    writeln!(out, "# crosstalk {} dataset {}/{}", env!("CARGO_PKG_VERSION"), config.task.name(), data.name)?;
    writeln!(out, "{CONFIG_PREFIX}{}", config.canonical())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&data.columns)?;
    for row in &data.rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// File for dataset `data` when a run writes to `base`: the base path itself
/// for the first dataset, `<stem>_<name>.csv` for the others.
pub fn dataset_path(base: &Path, data: &Dataset, first: bool) -> PathBuf {
    if first {
        return base.to_path_buf();
    }
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
    base.with_file_name(format!("{stem}_{}.csv", data.name))
}

pub fn write_all(base: Option<&Path>, sidecar: bool, config: &RunConfig, sets: &[Dataset]) -> Result<Vec<PathBuf>, CliError> {
    let Some(base) = base else {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        for (i, d) in sets.iter().enumerate() {
            if i > 0 {
                writeln!(lock)?;
            }
            write_csv(&mut lock, config, d)?;
        }
        return Ok(Vec::new());
    };
    let mut written = Vec::new();
    for (i, d) in sets.iter().enumerate() {
        let path = dataset_path(base, d, i == 0);
        if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        write_csv(std::io::BufWriter::new(std::fs::File::create(&path)?), config, d)?;
        if sidecar {
            let meta = Sidecar {
                tool: "crosstalk",
                version: env!("CARGO_PKG_VERSION"),
                dataset: d.name,
                columns: &d.columns,
                rows: d.rows.len(),
                config,
            };
            let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
            std::fs::write(path.with_extension("json"), json + "\n")?;
        }
        written.push(path);
    }
    Ok(written)
}
