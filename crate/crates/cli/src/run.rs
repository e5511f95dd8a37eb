use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use kplab::fields::io::write_field;
use serde::Serialize;
use serde_json::Value;

use crate::config::{ExperimentConfig, Expectation};
use crate::error::Result;
use crate::experiments::execute;

/// Version of the layout of `summary.json`.
pub const SUMMARY_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub timestamp_unix: u64,
    pub seeds: Vec<u64>,
    pub workers: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultEnvelope {
    pub schema: u32,
    pub config_echo: ExperimentConfig,
    #[serde(skip)]
    pub rows: String,
    pub summary: Value,
    pub verdict: Option<Expectation>,
    pub expectation_met: Option<bool>,
    pub provenance: Provenance,
    #[serde(skip)]
    pub checkpoints: Vec<(String, kplab::SpectralField)>,
}

impl ResultEnvelope {
    /// Process exit status: 2 when a declared expectation is contradicted by the verdict.
    pub fn exit_code(&self) -> i32 {
        if self.expectation_met == Some(false) {
            2
        } else {
            0
        }
    }
}

/// Resolves, validates and runs one experiment.
pub fn run(config: ExperimentConfig, workers: usize) -> Result<ResultEnvelope> {
    let config = config.resolve();
    config.validate()?;
    let out = execute(&config, workers)?;
    let expectation_met = match (config.expectation, out.verdict) {
        (Some(e), Some(v)) => Some(e == v),
        _ => None,
    };
    let timestamp_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(ResultEnvelope {
        schema: SUMMARY_SCHEMA,
        provenance: Provenance {
            tool: "kplab",
            version: env!("CARGO_PKG_VERSION"),
            timestamp_unix,
            seeds: config.sweep.seeds.clone(),
            workers,
        },
        config_echo: config,
        rows: out.csv,
        summary: out.summary,
        verdict: out.verdict,
        expectation_met,
        checkpoints: out.checkpoints,
    })
}

/// Writes `results.csv`, `summary.json`, `config.toml` and any checkpoints under `dir`.
pub fn write_outputs(env: &ResultEnvelope, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("results.csv"), &env.rows)?;
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(env)? + "\n")?;
    fs::write(dir.join("config.toml"), env.config_echo.to_toml())?;
    if !env.checkpoints.is_empty() {
        let fields = dir.join("fields");
        fs::create_dir_all(&fields)?;
        for (name, f) in &env.checkpoints {
            write_field(f, fs::File::create(fields.join(format!("{name}.bin")))?)?;
        }
    }
    Ok(())
}
