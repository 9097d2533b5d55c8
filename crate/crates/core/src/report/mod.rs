//! Output files: metric tables, correlation tables, surfaces, charts and the
//! run manifest.

mod svg;
mod tables;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::{ActorId, TeamId, Warnings};
use crate::metrics::{LeaderSeries, TeamMetricsRow, Traffic};
use crate::stats::CorrelationTable;

pub use svg::{line_chart_svg, TimeSeries};
pub use tables::{
    correlations_csv, correlations_text, read_correlations_csv, read_surface_csv, read_team_metrics_csv, spss_decimal,
    surface_csv, team_metrics_csv, CorrelationRecord,
};

pub const TOOL_NAME: &str = "coinmirror";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of a file's bytes.
pub fn file_sha256(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeamNote {
    pub team: TeamId,
    pub messages: u64,
    /// Metric name to the reason it is missing.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub missing: BTreeMap<String, String>,
}

/// Everything needed to reproduce a run. Contains no timestamps, so two runs
/// on the same inputs produce the same file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub messages: u64,
    pub actors: u64,
    pub warnings: Warnings,
    pub teams: Vec<TeamNote>,
    pub correlation_columns: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlation_error: Option<String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(config: serde_json::Value) -> Self {
        RunManifest {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            config,
            inputs: Vec::new(),
            messages: 0,
            actors: 0,
            warnings: Warnings::default(),
            teams: Vec::new(),
            correlation_columns: Vec::new(),
            correlation_error: None,
            outputs: Vec::new(),
        }
    }

    pub fn add_input(&mut self, role: &str, path: &Path) -> Result<()> {
        self.inputs.push(InputDigest {
            role: role.into(),
            path: path.display().to_string(),
            sha256: file_sha256(path)?,
        });
        Ok(())
    }
}

/// Writes `team_metrics.csv`, `correlations.csv`, `correlations.txt` and
/// `manifest.json` into `out_dir`. Without a correlation table the
/// correlation files carry only their header and the reason.
pub fn emit_run_report(
    out_dir: &Path,
    rows: &[TeamMetricsRow],
    table: Option<&CorrelationTable>,
    manifest: &RunManifest,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut put = |name: &str, text: &str| -> Result<()> {
        let path = out_dir.join(name);
        write_file(&path, text)?;
        written.push(path);
        Ok(())
    };
    put("team_metrics.csv", &team_metrics_csv(rows))?;
    match table {
        Some(t) => {
            put("correlations.csv", &correlations_csv(t))?;
            put("correlations.txt", &correlations_text(t))?;
        }
        None => {
            put("correlations.csv", "column_a,column_b,r,p,n,stars\n")?;
            let why = manifest.correlation_error.as_deref().unwrap_or("not computed");
            put("correlations.txt", &format!("correlations unavailable: {why}\n"))?;
        }
    }
    let mut manifest = manifest.clone();
    manifest.outputs.extend(
        [
            "team_metrics.csv",
            "correlations.csv",
            "correlations.txt",
            "manifest.json",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    manifest.outputs.sort();
    manifest.outputs.dedup();
    let json = serde_json::to_string_pretty(&manifest)? + "\n";
    put("manifest.json", &json)?;
    Ok(written)
}

/// `actor,team,messages_total,contribution_index`; actors without traffic
/// are left out.
pub fn contribution_scatter_csv<'a>(
    teams: impl IntoIterator<Item = (&'a TeamId, &'a BTreeMap<ActorId, Traffic>)>,
) -> String {
    let mut out = String::from("actor,team,messages_total,contribution_index\n");
    for (team, traffic) in teams {
        for (actor, t) in traffic {
            if let Ok(ci) = t.contribution_index() {
                out.push_str(&format!("{actor},{team},{},{}\n", t.total(), tables::fixed6(ci)));
            }
        }
    }
    out
}

/// `team,day,leader` with an empty leader cell for windows without one.
pub fn leaders_csv<'a>(series: impl IntoIterator<Item = (&'a TeamId, &'a LeaderSeries)>) -> String {
    let mut out = String::from("team,day,leader\n");
    for (team, s) in series {
        for (day, leader) in s.days.iter().zip(&s.leaders) {
            let who = leader.as_ref().map(ActorId::as_str).unwrap_or("");
            out.push_str(&format!("{team},{day},{who}\n"));
        }
    }
    out
}
