//! Run configuration: one TOML file describing inputs, window parameters and
//! output location.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WindowConfig;
use crate::metrics::{MetricsConfig, StrongTie, TeamMetricsRow, DEFAULT_CUTOFF_MINUTES, METRIC_COLUMNS};

/// Every key accepted in a run config, with its meaning. Printed by
/// `--help`.
pub const CONFIG_KEYS: &[(&str, &str)] = &[
    ("messages", "mbox file or message CSV (required)"),
    (
        "messages_format",
        "\"mbox\" or \"csv\"; default: from the file extension",
    ),
    (
        "rosters",
        "roster CSV: team,member,creativity[,presentation,content,shared] (required)",
    ),
    (
        "aliases",
        "alias file, one `raw<TAB>canonical` pair per line (optional)",
    ),
    (
        "positive_lexicon",
        "positive word list, one word per line (optional; needs negative_lexicon)",
    ),
    (
        "negative_lexicon",
        "negative word list, one word per line (optional; needs positive_lexicon)",
    ),
    (
        "dummy_addresses",
        "list of collector addresses removed from every recipient list; default []",
    ),
    ("output_dir", "directory for report files; default \"out\""),
    (
        "strong_tie",
        "\"mean\" or a positive number: minimum symmetrized edge weight of a strong tie; default \"mean\"",
    ),
    (
        "art_cutoff_minutes",
        "replies slower than this are ignored by the response time metric; default 20160",
    ),
    (
        "directed",
        "betweenness on the directed graph instead of the symmetrized one; default false",
    ),
    ("correlation_columns", "metric columns to correlate; default all nine"),
    ("window.step_days", "days between consecutive windows; default 1"),
    (
        "window.lookback_days",
        "days of mail each sliding window sees; default 7",
    ),
    ("window.mode", "\"sliding\" or \"cumulative\"; default \"sliding\""),
    (
        "window.origin",
        "day 0 as YYYY-MM-DD; default: date of the first message",
    ),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MessagesFormat {
    Mbox,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub messages: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub messages_format: Option<MessagesFormat>,
    pub rosters: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aliases: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positive_lexicon: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative_lexicon: Option<PathBuf>,
    #[serde(default)]
    pub dummy_addresses: Vec<String>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_strong_tie")]
    pub strong_tie: StrongTie,
    #[serde(default = "default_cutoff")]
    pub art_cutoff_minutes: f64,
    #[serde(default)]
    pub directed: bool,
    #[serde(default = "default_columns")]
    pub correlation_columns: Vec<String>,
    #[serde(default)]
    pub window: WindowConfig,
}

fn bare(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_strong_tie() -> StrongTie {
    StrongTie::Mean
}

fn default_cutoff() -> f64 {
    DEFAULT_CUTOFF_MINUTES
}

fn default_columns() -> Vec<String> {
    METRIC_COLUMNS.iter().map(|s| s.to_string()).collect()
}

impl RunConfig {
    /// Config with required paths set and everything else at its default.
    pub fn new(messages: impl Into<PathBuf>, rosters: impl Into<PathBuf>) -> Self {
        RunConfig {
            messages: messages.into(),
            messages_format: None,
            rosters: rosters.into(),
            aliases: None,
            positive_lexicon: None,
            negative_lexicon: None,
            dummy_addresses: Vec::new(),
            output_dir: default_output_dir(),
            strong_tie: default_strong_tie(),
            art_cutoff_minutes: default_cutoff(),
            directed: false,
            correlation_columns: default_columns(),
            window: WindowConfig::default(),
        }
    }

    /// Reads a TOML config. Relative paths are taken relative to the
    /// config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::from_toml(&text, base).map_err(|e| Error::Config(format!("{}: {}", path.display(), bare(e))))
    }

    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.rebase(base);
        Ok(cfg)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.messages);
        fix(&mut self.rosters);
        fix(&mut self.output_dir);
        for p in [
            &mut self.aliases,
            &mut self.positive_lexicon,
            &mut self.negative_lexicon,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
    }

    pub fn format(&self) -> MessagesFormat {
        self.messages_format
            .unwrap_or_else(|| match self.messages.extension().and_then(|e| e.to_str()) {
                Some(e) if e.eq_ignore_ascii_case("csv") => MessagesFormat::Csv,
                _ => MessagesFormat::Mbox,
            })
    }

    pub fn metrics_config(&self) -> MetricsConfig {
        MetricsConfig {
            window: self.window,
            strong_tie: self.strong_tie,
            art_cutoff_minutes: self.art_cutoff_minutes,
            directed: self.directed,
        }
    }

    /// Checks every constraint and reports all violations together.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let mut need_file = |key: &str, p: &Path| {
            if !p.is_file() {
                problems.push(format!("{key}: file not found: {}", p.display()));
            }
        };
        need_file("messages", &self.messages);
        need_file("rosters", &self.rosters);
        if let Some(p) = &self.aliases {
            need_file("aliases", p);
        }
        if let Some(p) = &self.positive_lexicon {
            need_file("positive_lexicon", p);
        }
        if let Some(p) = &self.negative_lexicon {
            need_file("negative_lexicon", p);
        }
        if self.positive_lexicon.is_some() != self.negative_lexicon.is_some() {
            problems.push("positive_lexicon and negative_lexicon must be given together".into());
        }
        if let Err(e) = self.window.validate() {
            problems.push(format!("window: {}", bare(e)));
        }
        if !(self.art_cutoff_minutes.is_finite() && self.art_cutoff_minutes > 0.0) {
            problems.push(format!(
                "art_cutoff_minutes must be positive, got {}",
                self.art_cutoff_minutes
            ));
        }
        if let StrongTie::Fixed(k) = self.strong_tie {
            if !(k.is_finite() && k > 0.0) {
                problems.push(format!("strong_tie must be \"mean\" or a positive number, got {k}"));
            }
        }
        if self.correlation_columns.len() < 2 {
            problems.push("correlation_columns: need ≥ 2 columns".into());
        }
        for c in &self.correlation_columns {
            if !TeamMetricsRow::is_column(c) {
                problems.push(format!("correlation_columns: unknown column {c:?}"));
            }
        }
        for d in &self.dummy_addresses {
            if d.trim().is_empty() {
                problems.push("dummy_addresses: empty address".into());
            }
        }
        if self.output_dir.as_os_str().is_empty() {
            problems.push("output_dir is empty".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("\n  ")))
        }
    }
}
