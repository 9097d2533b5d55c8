use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::centrality::{betweenness, centralization, degree};
use super::contribution::awvci;
use super::leadership::{count_handovers, leaders_from_surface, temporal_surface, LeaderSeries, TemporalSurface};
use super::response::{response_times, DEFAULT_CUTOFF_MINUTES};
use super::sentiment::{team_sentiment, SentimentLexicon};
use crate::error::{Error, Result};
use crate::graph::{build_graph, mean_symmetrized_weight, strong_tie_filter, window_series, Interval, WindowConfig};
use crate::ingest::{ActorId, MessageSet, TeamId, TeamRoster};

/// Metric columns of a team row, in table order.
pub const METRIC_COLUMNS: [&str; 9] = [
    "creativity",
    "bc_oscillations",
    "art_norm_min",
    "pos_sent",
    "awvci",
    "gbc_strong_tie",
    "group_dc",
    "msg_recvd",
    "num_actors",
];

/// One team's metric vector. Optional fields are missing when their metric
/// is undefined for the team (no replies, no traffic).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeamMetricsRow {
    pub team: TeamId,
    pub creativity: f64,
    pub bc_oscillations: u64,
    pub art_norm_min: Option<f64>,
    pub pos_sent: Option<f64>,
    pub awvci: Option<f64>,
    pub gbc_strong_tie: f64,
    pub group_dc: f64,
    pub msg_recvd: u64,
    pub num_actors: u64,
}

impl TeamMetricsRow {
    /// Value of a metric column by name; `None` for unknown names or
    /// missing values.
    pub fn get(&self, column: &str) -> Option<f64> {
        match column {
            "creativity" => Some(self.creativity),
            "bc_oscillations" => Some(self.bc_oscillations as f64),
            "art_norm_min" => self.art_norm_min,
            "pos_sent" => self.pos_sent,
            "awvci" => self.awvci,
            "gbc_strong_tie" => Some(self.gbc_strong_tie),
            "group_dc" => Some(self.group_dc),
            "msg_recvd" => Some(self.msg_recvd as f64),
            "num_actors" => Some(self.num_actors as f64),
            _ => None,
        }
    }

    pub fn is_column(name: &str) -> bool {
        METRIC_COLUMNS.contains(&name)
    }
}

/// Strong-tie threshold: `"mean"` or a fixed symmetrized weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StrongTie {
    /// Mean symmetrized edge weight of the team's full-course graph.
    Mean,
    Fixed(f64),
}

impl Serialize for StrongTie {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            StrongTie::Mean => s.serialize_str("mean"),
            StrongTie::Fixed(k) => s.serialize_f64(*k),
        }
    }
}

impl<'de> Deserialize<'de> for StrongTie {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Word(String),
            Number(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Word(w) if w.eq_ignore_ascii_case("mean") => Ok(StrongTie::Mean),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "strong_tie must be \"mean\" or a number, got {w:?}"
            ))),
            Raw::Number(k) => Ok(StrongTie::Fixed(k)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsConfig {
    pub window: WindowConfig,
    pub strong_tie: StrongTie,
    pub art_cutoff_minutes: f64,
    pub directed: bool,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            window: WindowConfig::default(),
            strong_tie: StrongTie::Mean,
            art_cutoff_minutes: DEFAULT_CUTOFF_MINUTES,
            directed: false,
        }
    }
}

/// Everything computed for one team, including the per-window data behind
/// the row.
#[derive(Clone, Debug)]
pub struct TeamAnalysis {
    pub row: TeamMetricsRow,
    pub surface: TemporalSurface,
    pub leaders: LeaderSeries,
    /// Missing row fields with the reason.
    pub missing: Vec<(&'static str, String)>,
}

pub fn team_metrics(
    ms: &MessageSet,
    roster: &TeamRoster,
    cfg: &MetricsConfig,
    lex: &SentimentLexicon,
) -> Result<TeamMetricsRow> {
    team_analysis(ms, roster, cfg, lex).map(|a| a.row)
}

pub fn team_analysis(
    ms: &MessageSet,
    roster: &TeamRoster,
    cfg: &MetricsConfig,
    lex: &SentimentLexicon,
) -> Result<TeamAnalysis> {
    if roster.members.is_empty() {
        return Err(Error::Invalid(format!("team {} has an empty roster", roster.team)));
    }
    let team = &roster.team;
    let mut missing = Vec::new();

    let windows = window_series(ms, &cfg.window, Some(roster))?;
    let surface = temporal_surface(&windows, roster, cfg.directed);
    let leaders = leaders_from_surface(&surface);
    let bc_oscillations = count_handovers(&leaders);

    let full = Interval::covering(ms).ok_or_else(|| Error::Invalid("empty message set".into()))?;
    let course_graph = build_graph(ms, full, Some(roster));
    let threshold = match cfg.strong_tie {
        StrongTie::Mean => mean_symmetrized_weight(&course_graph).unwrap_or(1.0),
        StrongTie::Fixed(k) => k,
    };
    let strong = strong_tie_filter(&course_graph, threshold);
    let n = course_graph.node_count();
    let gbc_strong_tie = centralization(&betweenness(&strong, true, cfg.directed), n);
    let group_dc = centralization(&degree(&course_graph), n);

    let art_norm_min = match response_times(ms, team, cfg.art_cutoff_minutes) {
        Ok(s) => Some(s.mean_minutes),
        Err(e) => {
            missing.push(("art_norm_min", e.to_string()));
            None
        }
    };
    let pos_sent = match team_sentiment(ms, team, lex) {
        Ok(s) => Some(s.pos),
        Err(e) => {
            missing.push(("pos_sent", e.to_string()));
            None
        }
    };
    let awvci = match awvci(ms.messages(), roster) {
        Ok(v) => Some(v),
        Err(e) => {
            missing.push(("awvci", e.to_string()));
            None
        }
    };

    let msg_recvd = ms
        .messages()
        .iter()
        .map(|m| m.recipients.iter().filter(|r| roster.contains(r)).count() as u64)
        .sum();
    let mut actors: BTreeSet<&ActorId> = BTreeSet::new();
    for m in ms.team_messages(team) {
        actors.insert(&m.sender);
        actors.extend(m.recipients.iter());
    }

    for (field, why) in &missing {
        log::warn!("team {team}: {field} missing ({why})");
    }

    Ok(TeamAnalysis {
        row: TeamMetricsRow {
            team: team.clone(),
            creativity: roster.ratings.creativity,
            bc_oscillations,
            art_norm_min,
            pos_sent,
            awvci,
            gbc_strong_tie,
            group_dc,
            msg_recvd,
            num_actors: actors.len() as u64,
        },
        surface,
        leaders,
        missing,
    })
}
