//! Run outputs: CSV tables, text artifacts and the run manifest.
//!
//! Without `--out` tables go to standard output after the summary and no
//! manifest is written. With `--out DIR` every table becomes `DIR/<name>.csv`
//! and `DIR/manifest.json` records how to reproduce them.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::fail::{Fail, Outcome};

/// Shortest representation that round-trips, in scientific notation for
/// very small or very large magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn join(xs: impl IntoIterator<Item = f64>) -> String {
    xs.into_iter().map(num).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub args: Vec<String>,
    pub inputs: Vec<String>,
    pub seed: u64,
    pub tolerances: Vec<(String, f64)>,
    pub outputs: Vec<String>,
    pub wall_time_secs: f64,
}

pub struct Sink {
    dir: Option<PathBuf>,
    started: Instant,
    pub manifest: RunManifest,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>, subcommand: &str, args: Vec<String>, seed: u64) -> Outcome<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).map_err(|e| Fail::io(format!("{}: {e}", d.display())))?;
        }
        Ok(Self {
            dir,
            started: Instant::now(),
            manifest: RunManifest {
                tool: env!("CARGO_PKG_NAME").into(),
                version: env!("CARGO_PKG_VERSION").into(),
                subcommand: subcommand.into(),
                args,
                inputs: Vec::new(),
                seed,
                tolerances: Vec::new(),
                outputs: Vec::new(),
                wall_time_secs: 0.0,
            },
        })
    }

    pub fn has_dir(&self) -> bool {
        self.dir.is_some()
    }

    pub fn input(&mut self, path: &Path) {
        self.manifest.inputs.push(path.display().to_string());
    }

    pub fn tolerance(&mut self, name: &str, value: f64) {
        self.manifest.tolerances.push((name.into(), value));
    }

    /// Writes `name.csv`, or prints the table when there is no output
    /// directory.
    pub fn table<H: AsRef<[u8]>>(&mut self, name: &str, header: &[H], rows: &[Vec<String>]) -> Outcome {
        let file = format!("{name}.csv");
        match &self.dir {
            Some(dir) => {
                let path = dir.join(&file);
                let mut w = csv::Writer::from_path(&path).map_err(|e| Fail::io(format!("{}: {e}", path.display())))?;
                write_rows(&mut w, header, rows).map_err(|e| Fail::io(format!("{}: {e}", path.display())))?;
                self.manifest.outputs.push(file);
            }
            None => {
                let mut w = csv::Writer::from_writer(std::io::stdout());
                write_rows(&mut w, header, rows).map_err(|e| Fail::io(e.to_string()))?;
            }
        }
        Ok(())
    }

    /// Like [`Sink::table`], but small tables already shown in the summary
    /// are only written to the output directory.
    pub fn record<H: AsRef<[u8]>>(&mut self, name: &str, header: &[H], rows: &[Vec<String>]) -> Outcome {
        if self.dir.is_some() {
            self.table(name, header, rows)
        } else {
            Ok(())
        }
    }

    /// Writes a text artifact, or prints it when there is no output directory.
    pub fn text(&mut self, file: &str, body: &str) -> Outcome {
        match &self.dir {
            Some(dir) => {
                let path = dir.join(file);
                fs::write(&path, body).map_err(|e| Fail::io(format!("{}: {e}", path.display())))?;
                self.manifest.outputs.push(file.into());
            }
            None => print!("{body}"),
        }
        Ok(())
    }

    pub fn finish(mut self) -> Outcome {
        self.manifest.wall_time_secs = self.started.elapsed().as_secs_f64();
        if let Some(dir) = &self.dir {
            let path = dir.join("manifest.json");
            let body = serde_json::to_string_pretty(&self.manifest)?;
            fs::write(&path, body + "\n").map_err(|e| Fail::io(format!("{}: {e}", path.display())))?;
        }
        Ok(())
    }
}

fn write_rows<W: std::io::Write, H: AsRef<[u8]>>(w: &mut csv::Writer<W>, header: &[H], rows: &[Vec<String>]) -> csv::Result<()> {
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Header `prefix1, …, prefix{n}`.
pub fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}
