use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde_json::{json, Value};

/// Writes artifacts stamped with the configuration hash and records them for
/// the manifest. Run metadata that varies between runs goes to the manifest
/// only, so tables are byte-identical for identical inputs.
pub struct Artifacts {
    dir: PathBuf,
    hash: String,
    csv: bool,
    json: bool,
    written: Vec<String>,
    started: Instant,
}

impl Artifacts {
    pub fn new(dir: &Path, hash: &str, formats: &[String]) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            hash: hash.to_string(),
            csv: formats.iter().any(|f| f == "csv"),
            json: formats.iter().any(|f| f == "json"),
            written: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn csv(&mut self, name: &str, body: &str) -> Result<()> {
        if !self.csv {
            return Ok(());
        }
        let text = format!("# config_hash={}\n{body}", self.hash);
        self.write(&format!("{name}.csv"), &text)
    }

    pub fn json(&mut self, name: &str, value: Value) -> Result<()> {
        if !self.json {
            return Ok(());
        }
        let wrapped = json!({ "config_hash": self.hash, "report": value });
        self.write(&format!("{name}.json"), &(serde_json::to_string_pretty(&wrapped)? + "\n"))
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<()> {
        self.write(name, body)
    }

    fn write(&mut self, file: &str, text: &str) -> Result<()> {
        let path = self.dir.join(file);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(file.to_string());
        Ok(())
    }

    pub fn manifest(&self, subcommand: &str, seed: Option<u64>, exit_code: u8) -> Result<()> {
        let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let m = json!({
            "subcommand": subcommand,
            "config_hash": self.hash,
            "seed": seed,
            "exit_code": exit_code,
            "versions": {
                "spectral-rg": spectral_rg::VERSION,
                "srg": env!("CARGO_PKG_VERSION"),
            },
            "artifacts": self.written,
            "wall_time_s": self.started.elapsed().as_secs_f64(),
            "finished_unix": started,
        });
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&m)? + "\n")
            .with_context(|| format!("writing {}", path.display()))
    }
}
